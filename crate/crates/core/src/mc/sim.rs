use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::moments::Moments;
use crate::error::{check_probability, Error, Result};
use crate::rng::stream_rng;
use crate::trie::{sample_shape_with, ShapeStats, DEFAULT_MAX_DEPTH};

/// Trials per accumulator; chunk results are merged in index order so the
/// thread count never changes a result.
pub const CHUNK: u64 = 256;

/// Fewest trials [`run`] accepts.
pub const MIN_TRIALS: u64 = 100;

/// Runs `f` on a pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Shape of trial `trial`: binomial splitting on stream `trial` of `seed`.
pub fn trial_shape(n: u64, p: f64, seed: u64, trial: u64) -> Result<ShapeStats> {
    sample_shape_with(&mut stream_rng(seed, trial), n, p, DEFAULT_MAX_DEPTH).map_err(|e| match e {
        Error::DepthGuardExceeded { max_depth, .. } => Error::DepthGuardExceeded {
            max_depth,
            trial: Some(trial),
        },
        other => other,
    })
}

pub(crate) fn check_run(n: u64, p: f64, trials: u64, min_trials: u64) -> Result<()> {
    check_probability(p)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if trials < min_trials {
        return Err(Error::InvalidParameter(format!(
            "trials must be >= {min_trials}, got {trials}"
        )));
    }
    Ok(())
}

/// Every trial's shape, in trial order.
pub fn samples(n: u64, p: f64, trials: u64, seed: u64, threads: usize) -> Result<Vec<ShapeStats>> {
    check_probability(p)?;
    with_threads(threads, || {
        (0..trials)
            .into_par_iter()
            .map(|t| trial_shape(n, p, seed, t))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Monte-Carlo estimates for (S, K, N) over independent tries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Sample means of size, key path length and node path length.
    pub mean: [f64; 3],
    pub se_mean: [f64; 3],
    /// Unbiased covariance matrix, same coordinate order.
    pub cov: [[f64; 3]; 3],
    pub rho_sk: f64,
    pub rho_sn: f64,
    pub rho_kn: f64,
    pub skewness: [f64; 3],
    pub excess_kurtosis: [f64; 3],
}

impl SampleSummary {
    fn from_moments(n: u64, p: f64, seed: u64, m: &Moments<3>) -> Self {
        SampleSummary {
            n,
            p,
            trials: m.count,
            seed,
            mean: m.mean,
            se_mean: std::array::from_fn(|i| m.se_mean(i)),
            cov: std::array::from_fn(|i| std::array::from_fn(|j| m.cov(i, j))),
            rho_sk: m.corr(0, 1),
            rho_sn: m.corr(0, 2),
            rho_kn: m.corr(1, 2),
            skewness: std::array::from_fn(|i| m.skewness(i)),
            excess_kurtosis: std::array::from_fn(|i| m.excess_kurtosis(i)),
        }
    }

    /// Long-format CSV, one `quantity,value` row per field.
    pub fn write_csv<W: Write>(&self, mut out: W, config: Option<&str>) -> Result<()> {
        if let Some(c) = config {
            writeln!(out, "# config: {c}")?;
        }
        writeln!(out, "quantity,value")?;
        writeln!(out, "n,{}", self.n)?;
        writeln!(out, "p,{}", self.p)?;
        writeln!(out, "trials,{}", self.trials)?;
        writeln!(out, "seed,{}", self.seed)?;
        let names = ["S", "K", "N"];
        for (i, name) in names.iter().enumerate() {
            writeln!(out, "mean_{name},{}", self.mean[i])?;
            writeln!(out, "se_mean_{name},{}", self.se_mean[i])?;
            writeln!(out, "var_{name},{}", self.cov[i][i])?;
            writeln!(out, "skewness_{name},{}", self.skewness[i])?;
            writeln!(out, "excess_kurtosis_{name},{}", self.excess_kurtosis[i])?;
        }
        writeln!(out, "cov_SK,{}", self.cov[0][1])?;
        writeln!(out, "cov_SN,{}", self.cov[0][2])?;
        writeln!(out, "cov_KN,{}", self.cov[1][2])?;
        writeln!(out, "rho_SK,{}", self.rho_sk)?;
        writeln!(out, "rho_SN,{}", self.rho_sn)?;
        writeln!(out, "rho_KN,{}", self.rho_kn)?;
        Ok(())
    }
}

/// Streams `trials` random tries through the moment accumulators.
///
/// Trial `t` always uses stream `t` of `seed`, and per-chunk results are
/// merged in chunk order, so the summary is bitwise identical for any
/// `threads` (0 = one worker per core).
pub fn run(n: u64, p: f64, trials: u64, seed: u64, threads: usize) -> Result<SampleSummary> {
    check_run(n, p, trials, MIN_TRIALS)?;
    let chunks = trials.div_ceil(CHUNK);
    let parts = with_threads(threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut m = Moments::<3>::default();
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let s = trial_shape(n, p, seed, t)?;
                    m.push([s.size as f64, s.kpl as f64, s.npl as f64]);
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let total = parts
        .iter()
        .fold(Moments::<3>::default(), |acc, m| acc.merged(m));
    Ok(SampleSummary::from_moments(n, p, seed, &total))
}

/// Raw per-trial dump with columns `trial,S,K,N`.
pub fn write_raw_csv<W: Write>(
    mut out: W,
    shapes: &[ShapeStats],
    config: Option<&str>,
) -> Result<()> {
    if let Some(c) = config {
        writeln!(out, "# config: {c}")?;
    }
    writeln!(out, "trial,S,K,N")?;
    for (t, s) in shapes.iter().enumerate() {
        writeln!(out, "{t},{},{},{}", s.size, s.kpl, s.npl)?;
    }
    Ok(())
}
