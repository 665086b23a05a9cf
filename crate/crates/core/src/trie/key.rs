use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_probability, Result};
use crate::rng::stream_rng;

/// Finite prefix of an infinite binary key, most-significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Key {
    words: Vec<u64>,
    len: usize,
}

impl Key {
    /// Key of `len` bits packed MSB-first into `words`.
    ///
    /// Panics if `words` holds fewer than `len` bits.
    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert!(words.len() * 64 >= len, "not enough words for {len} bits");
        Key { words, len }
    }

    /// Parses a string of `'0'`/`'1'` characters; `None` on anything else.
    pub fn parse(bits: &str) -> Option<Self> {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => words[i / 64] |= 1 << (63 - i % 64),
                _ => return None,
            }
        }
        Some(Key {
            words,
            len: bits.len(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit `i`; `None` past the stored prefix.
    #[inline]
    pub fn bit(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.words[i / 64] >> (63 - i % 64) & 1 == 1)
    }
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) == Some(true) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn random_key(rng: &mut ChaCha8Rng, p: f64, prefix_len: usize) -> Key {
    let n_words = prefix_len.div_ceil(64);
    let mut words = vec![0u64; n_words];
    if p == 0.5 {
        for w in &mut words {
            *w = rng.random();
        }
    } else {
        for i in 0..prefix_len {
            if rng.random::<f64>() < p {
                words[i / 64] |= 1 << (63 - i % 64);
            }
        }
    }
    // clear bits past the prefix so equal prefixes compare equal
    if !prefix_len.is_multiple_of(64) {
        let last = n_words - 1;
        words[last] &= !0u64 << (64 - prefix_len % 64);
    }
    Key {
        words,
        len: prefix_len,
    }
}

/// `n` independent keys whose bits are 1 with probability `p`.
///
/// Key `i` is drawn from its own counter-derived stream, so asking for a
/// longer `prefix_len` with the same seed extends every key rather than
/// replacing it.
pub fn sample_keys(n: usize, p: f64, seed: u64, prefix_len: usize) -> Result<Vec<Key>> {
    check_probability(p)?;
    Ok((0..n)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            random_key(&mut rng, p, prefix_len)
        })
        .collect())
}
