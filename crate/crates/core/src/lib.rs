//! Joint moments of the size and path lengths of random binary tries.
//!
//! The crate has four engines that check each other:
//!
//! * [`trie`] builds tries from explicit keys and samples their shape
//!   directly by binomial splitting.
//! * [`exact`] solves the moment recurrences for every `n <= n_max` and
//!   evaluates the Poisson-model transforms of those moments.
//! * [`asym`] evaluates the asymptotic constants: entropy, the variance
//!   slope λ, the Fourier coefficients of the periodic fluctuations and the
//!   limiting correlation F(n) of size and key path length at p = 1/2.
//! * [`mc`] runs Monte-Carlo experiments: streaming moments, whitening of
//!   (S, K) by a covariance matrix, joint histograms and normality checks.

pub mod asym;
pub mod error;
pub mod exact;
pub mod mc;
pub mod numeric;
pub mod rng;
pub mod trie;

pub use error::{Error, Result};

// The guide's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tries.md")]
    mod tries {}
    #[doc = include_str!("../../../book/src/exact.md")]
    mod exact {}
    #[doc = include_str!("../../../book/src/poisson.md")]
    mod poisson {}
    #[doc = include_str!("../../../book/src/fluctuations.md")]
    mod fluctuations {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/whitening.md")]
    mod whitening {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
