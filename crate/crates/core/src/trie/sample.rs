use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::{build_trie, sample_keys, shape_stats, ShapeStats};
use crate::error::{check_probability, Error, Result};
use crate::rng::stream_rng;

pub const DEFAULT_MAX_DEPTH: usize = 2048;
pub const DEFAULT_PREFIX_LEN: usize = 64;

/// Below this many trials the binomial is drawn by sequential inversion.
const INVERSION_LIMIT: u64 = 64;

/// Draws Binom(m, p).
///
/// Sequential inversion for `m < 64`; larger `m` go to the
/// rejection sampler of `rand_distr`.
pub fn sample_binomial<R: Rng + ?Sized>(rng: &mut R, m: u64, p: f64) -> u64 {
    if m >= INVERSION_LIMIT {
        return Binomial::new(m, p)
            .expect("p validated by caller")
            .sample(rng);
    }
    let flip = p > 0.5;
    let (small, large) = if flip { (1.0 - p, p) } else { (p, 1.0 - p) };
    let ratio = small / large;
    let u: f64 = rng.random();
    let mut pk = large.powi(m as i32);
    let mut cdf = pk;
    let mut k = 0;
    while u > cdf && k < m {
        pk *= (m - k) as f64 / (k + 1) as f64 * ratio;
        cdf += pk;
        k += 1;
    }
    if flip {
        m - k
    } else {
        k
    }
}

/// Samples the shape of a random trie on `n` keys by binomial splitting,
/// without materialising any key.
///
/// A node holding `m >= 2` keys at depth `d` is internal: it adds 1 to the
/// size and `d` to the internal path length and sends Binom(m, p) keys to one
/// side. Nodes with one key add their depth to the external path length.
pub fn sample_shape_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: u64,
    p: f64,
    max_depth: usize,
) -> Result<ShapeStats> {
    check_probability(p)?;
    let mut stats = ShapeStats::empty(n);
    if n <= 1 {
        return Ok(stats);
    }
    let mut stack: Vec<(u64, u64)> = Vec::with_capacity(64);
    stack.push((n, 0));
    while let Some((m, depth)) = stack.pop() {
        match m {
            0 => {}
            1 => {
                stats.kpl += depth;
                stats.height = stats.height.max(depth);
            }
            _ => {
                if depth as usize >= max_depth {
                    return Err(Error::DepthGuardExceeded {
                        max_depth,
                        trial: None,
                    });
                }
                stats.size += 1;
                stats.npl += depth;
                let b = sample_binomial(rng, m, p);
                stack.push((m - b, depth + 1));
                stack.push((b, depth + 1));
            }
        }
    }
    Ok(stats)
}

/// [`sample_shape_with`] on the generator stream selected by `seed`.
pub fn sample_shape(n: u64, p: f64, seed: u64, max_depth: usize) -> Result<ShapeStats> {
    sample_shape_with(&mut stream_rng(seed, 0), n, p, max_depth)
}

/// Shape of the trie built from `n` explicit random keys. Prefixes start
/// at [`DEFAULT_PREFIX_LEN`] bits and double until all keys separate.
pub fn sample_via_keys(n: usize, p: f64, seed: u64) -> Result<ShapeStats> {
    let mut prefix_len = DEFAULT_PREFIX_LEN;
    loop {
        let keys = sample_keys(n, p, seed, prefix_len)?;
        match build_trie(&keys) {
            Ok(trie) => return Ok(shape_stats(&trie)),
            Err(Error::KeyExhausted { .. }) if prefix_len < 1 << 16 => prefix_len *= 2,
            Err(e) => return Err(e),
        }
    }
}
