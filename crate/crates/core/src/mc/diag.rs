use std::io::Write;

use serde::{Deserialize, Serialize};

use super::moments::Moments;
use super::sim::{check_run, samples};
use crate::error::{Error, Result};

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between the empirical law of `values` and N(0, 1).
pub fn ks_distance(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Shape statistics of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalStats {
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Kolmogorov distance of the standardized sample to N(0, 1).
    pub ks_distance: f64,
}

/// Statistics of `values` after standardizing by their own mean and
/// standard deviation.
pub fn marginal_stats(values: &[f64]) -> Result<MarginalStats> {
    let mut m = Moments::<1>::default();
    values.iter().for_each(|&x| m.push([x]));
    if values.len() < 2 || m.m2[0] <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (mean, sd) = (m.mean[0], m.var(0).sqrt());
    let z: Vec<f64> = values.iter().map(|x| (x - mean) / sd).collect();
    Ok(MarginalStats {
        mean,
        sd,
        skewness: m.skewness(0),
        excess_kurtosis: m.excess_kurtosis(0),
        ks_distance: ks_distance(&z),
    })
}

/// Marginal diagnostics of size and key path length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub size: MarginalStats,
    pub kpl: MarginalStats,
}

pub const MIN_NORMALITY_TRIALS: u64 = 1000;

pub fn normality_report(
    n: u64,
    p: f64,
    trials: u64,
    seed: u64,
    threads: usize,
) -> Result<NormalityReport> {
    check_run(n, p, trials, MIN_NORMALITY_TRIALS)?;
    let xs = samples(n, p, trials, seed, threads)?;
    let s: Vec<f64> = xs.iter().map(|x| x.size as f64).collect();
    let k: Vec<f64> = xs.iter().map(|x| x.kpl as f64).collect();
    Ok(NormalityReport {
        n,
        p,
        trials,
        seed,
        size: marginal_stats(&s)?,
        kpl: marginal_stats(&k)?,
    })
}

/// Standardized values beyond ±`HIST_RANGE` land in the edge bins.
pub const HIST_RANGE: f64 = 4.0;

pub const MIN_BINS: usize = 10;

/// Counts of (S, K), each standardized by its sample mean and standard
/// deviation, on a `bins × bins` grid over [-4, 4]².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointHistogram {
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub bins: usize,
    pub range: f64,
    /// Row-major: row = size bin, column = key path length bin.
    pub counts: Vec<u64>,
    pub mean: [f64; 2],
    pub sd: [f64; 2],
    pub correlation: f64,
}

impl JointHistogram {
    pub fn count(&self, s_bin: usize, k_bin: usize) -> u64 {
        self.counts[s_bin * self.bins + k_bin]
    }

    fn center(&self, bin: usize) -> f64 {
        let w = 2.0 * self.range / self.bins as f64;
        -self.range + (bin as f64 + 0.5) * w
    }

    /// Long-format CSV `s_bin,k_bin,s_center,k_center,count`.
    pub fn write_csv<W: Write>(&self, mut out: W, config: Option<&str>) -> Result<()> {
        if let Some(c) = config {
            writeln!(out, "# config: {c}")?;
        }
        writeln!(out, "s_bin,k_bin,s_center,k_center,count")?;
        for i in 0..self.bins {
            for j in 0..self.bins {
                writeln!(
                    out,
                    "{i},{j},{},{},{}",
                    self.center(i),
                    self.center(j),
                    self.count(i, j)
                )?;
            }
        }
        Ok(())
    }
}

fn bin_of(z: f64, bins: usize) -> usize {
    let t = (z + HIST_RANGE) / (2.0 * HIST_RANGE) * bins as f64;
    (t.floor().max(0.0) as usize).min(bins - 1)
}

pub fn joint_histogram(
    n: u64,
    p: f64,
    trials: u64,
    seed: u64,
    bins: usize,
    threads: usize,
) -> Result<JointHistogram> {
    check_run(n, p, trials, 2)?;
    if bins < MIN_BINS {
        return Err(Error::InvalidParameter(format!(
            "bins must be >= {MIN_BINS}, got {bins}"
        )));
    }
    let xs = samples(n, p, trials, seed, threads)?;
    let mut m = Moments::<2>::default();
    for x in &xs {
        m.push([x.size as f64, x.kpl as f64]);
    }
    let sd = [m.var(0).sqrt(), m.var(1).sqrt()];
    let mut counts = vec![0u64; bins * bins];
    for x in &xs {
        let zs = (x.size as f64 - m.mean[0]) / sd[0];
        let zk = (x.kpl as f64 - m.mean[1]) / sd[1];
        // a zero spread sends everything to the centre
        let (zs, zk) = (
            if zs.is_finite() { zs } else { 0.0 },
            if zk.is_finite() { zk } else { 0.0 },
        );
        counts[bin_of(zs, bins) * bins + bin_of(zk, bins)] += 1;
    }
    Ok(JointHistogram {
        n,
        p,
        trials,
        seed,
        bins,
        range: HIST_RANGE,
        counts,
        mean: m.mean,
        sd,
        correlation: m.corr(0, 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_780_1).abs() < 1e-15);
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-17);
    }

    #[test]
    fn ks_of_normal_quantiles_is_small() {
        // midpoint quantiles have distance exactly 1/(2n)
        let n = 1000;
        let mut v: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                // bisection on the cdf
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < u {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                lo
            })
            .collect();
        assert!((ks_distance(&v) - 0.5 / n as f64).abs() < 1e-9);
        v.iter_mut().for_each(|x| *x += 1.0);
        assert!(ks_distance(&v) > 0.3);
    }

    #[test]
    fn constant_marginal_is_rejected() {
        let xs = samples(2, 0.5, 500, 4, 1).unwrap();
        let diff: Vec<f64> = xs
            .iter()
            .map(|x| x.kpl as f64 - 2.0 * x.size as f64)
            .collect();
        assert!(matches!(marginal_stats(&diff), Err(Error::ZeroVariance)));
    }

    #[test]
    fn normality_report_is_deterministic() {
        let a = normality_report(500, 0.3, 1000, 21, 0).unwrap();
        let b = normality_report(500, 0.3, 1000, 21, 1).unwrap();
        assert_eq!(a, b);
        assert!(a.size.ks_distance < 0.1);
        assert!(normality_report(500, 0.3, 999, 21, 0).is_err());
    }

    #[test]
    fn histogram_counts_every_trial() {
        let h = joint_histogram(300, 0.5, 2000, 8, 12, 0).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 2000);
        assert_eq!(h.counts.len(), 144);
        assert!(h.correlation > 0.8);
        assert!(joint_histogram(300, 0.5, 2000, 8, 9, 0).is_err());
        let mut buf = Vec::new();
        h.write_csv(&mut buf, None).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 145);
        // degenerate spread still bins every trial
        let h = joint_histogram(2, 0.5, 100, 8, 10, 0).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 100);
    }

    #[test]
    fn bins_clamp_to_the_edges() {
        assert_eq!(bin_of(-100.0, 10), 0);
        assert_eq!(bin_of(100.0, 10), 9);
        assert_eq!(bin_of(0.0, 10), 5);
        assert_eq!(bin_of(-0.01, 10), 4);
    }
}
