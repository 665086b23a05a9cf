//! Binary tries: explicit construction from keys and direct sampling of
//! their shape by recursive binomial splitting.

mod build;
mod key;
mod sample;

pub use build::{build_trie, shape_stats, Node, NodeId, Trie};
pub use key::{sample_keys, Key};
pub use sample::{
    sample_binomial, sample_shape, sample_shape_with, sample_via_keys, DEFAULT_MAX_DEPTH,
    DEFAULT_PREFIX_LEN,
};

use serde::{Deserialize, Serialize};

/// A seven-key example whose trie has S = 8, K = 27, N = 18.
pub const SEVEN_KEYS: [&str; 7] = [
    "00011100", "01010100", "01100111", "10111010", "11000011", "11001000", "11001110",
];

/// Shape parameters of one trie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ShapeStats {
    /// Number of keys.
    pub n: u64,
    /// Internal nodes (S).
    pub size: u64,
    /// Sum of external-node depths (K).
    pub kpl: u64,
    /// Sum of internal-node depths (N).
    pub npl: u64,
    /// Largest external-node depth.
    pub height: u64,
}

impl ShapeStats {
    pub const fn empty(n: u64) -> Self {
        ShapeStats {
            n,
            size: 0,
            kpl: 0,
            npl: 0,
            height: 0,
        }
    }

    /// Checks the structural relations every trie satisfies.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.n <= 1 {
            if (self.size, self.kpl, self.npl, self.height) != (0, 0, 0, 0) {
                return Err(format!("n = {} must have all-zero shape", self.n));
            }
            return Ok(());
        }
        if self.size == 0 {
            return Err("n >= 2 needs at least one internal node".into());
        }
        if self.kpl < self.n {
            return Err(format!("kpl {} < n {}", self.kpl, self.n));
        }
        if (self.npl == 0) != (self.size <= 1) {
            return Err(format!(
                "npl {} inconsistent with size {}",
                self.npl, self.size
            ));
        }
        if self.height * self.n < self.kpl || self.height > self.size {
            return Err(format!("height {} out of range", self.height));
        }
        Ok(())
    }
}
