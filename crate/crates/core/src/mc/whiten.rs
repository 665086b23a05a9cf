use std::io::Write;

use serde::{Deserialize, Serialize};

use super::diag::ks_distance;
use super::moments::Moments;
use super::sim::{check_run, samples, MIN_TRIALS};
use crate::asym::{
    params, sigma_matrix, SigmaVariant, SymMatrix2, SymmetricFluctuations, Truncation,
};
use crate::error::{Error, Result};
use crate::exact::{MomentTable, Precision, MAX_N};

/// Which covariance matrix whitens the sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixSource {
    /// Exact covariance matrix at n, centred at the exact means.
    Exact,
    /// The sample's own covariance, centred at the sample means.
    Sample,
    /// Asymptotic covariance matrix (p = 1/2), centred at the sample means.
    Asymptotic,
}

impl MatrixSource {
    /// Exact when the table reaches `n`, asymptotic otherwise.
    pub fn default_for(n: u64) -> Self {
        if n as usize <= MAX_N {
            MatrixSource::Exact
        } else {
            MatrixSource::Asymptotic
        }
    }
}

impl std::str::FromStr for MatrixSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MatrixSource::Exact),
            "sample" => Ok(MatrixSource::Sample),
            "asymptotic" => Ok(MatrixSource::Asymptotic),
            other => Err(Error::InvalidParameter(format!(
                "source must be exact, sample or asymptotic, got {other}"
            ))),
        }
    }
}

impl std::fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixSource::Exact => "exact",
            MatrixSource::Sample => "sample",
            MatrixSource::Asymptotic => "asymptotic",
        })
    }
}

/// Outcome of whitening the (S, K) sample by Σ^{-1/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitenReport {
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub source: MatrixSource,
    /// The matrix Σ that was inverted.
    pub matrix: SymMatrix2,
    /// Point subtracted before whitening.
    pub center: [f64; 2],
    /// Second moments of the whitened vectors about the centre (exact
    /// source) or about their mean (other sources).
    pub whitened_cov: SymMatrix2,
    pub max_offdiag: f64,
    /// Largest entrywise distance of `whitened_cov` to the identity.
    pub identity_distance: f64,
    pub skewness: [f64; 2],
    pub excess_kurtosis: [f64; 2],
    /// Kolmogorov distance of each whitened coordinate to N(0, 1).
    pub ks_distance: [f64; 2],
}

impl WhitenReport {
    pub fn write_csv<W: Write>(&self, mut out: W, config: Option<&str>) -> Result<()> {
        if let Some(c) = config {
            writeln!(out, "# config: {c}")?;
        }
        writeln!(out, "quantity,value")?;
        writeln!(out, "n,{}", self.n)?;
        writeln!(out, "p,{}", self.p)?;
        writeln!(out, "trials,{}", self.trials)?;
        writeln!(out, "seed,{}", self.seed)?;
        writeln!(out, "source,{}", self.source)?;
        writeln!(out, "sigma_SS,{}", self.matrix.a)?;
        writeln!(out, "sigma_SK,{}", self.matrix.b)?;
        writeln!(out, "sigma_KK,{}", self.matrix.c)?;
        writeln!(out, "center_S,{}", self.center[0])?;
        writeln!(out, "center_K,{}", self.center[1])?;
        writeln!(out, "whitened_11,{}", self.whitened_cov.a)?;
        writeln!(out, "whitened_12,{}", self.whitened_cov.b)?;
        writeln!(out, "whitened_22,{}", self.whitened_cov.c)?;
        writeln!(out, "max_offdiag,{}", self.max_offdiag)?;
        writeln!(out, "identity_distance,{}", self.identity_distance)?;
        for i in 0..2 {
            writeln!(out, "skewness_{},{}", i + 1, self.skewness[i])?;
            writeln!(out, "excess_kurtosis_{},{}", i + 1, self.excess_kurtosis[i])?;
            writeln!(out, "ks_distance_{},{}", i + 1, self.ks_distance[i])?;
        }
        Ok(())
    }
}

/// Whitens `trials` samples of (S_n, K_n).
///
/// `source = None` picks [`MatrixSource::default_for`].
pub fn whiten(
    n: u64,
    p: f64,
    trials: u64,
    seed: u64,
    source: Option<MatrixSource>,
    threads: usize,
) -> Result<WhitenReport> {
    check_run(n, p, trials, MIN_TRIALS)?;
    let source = source.unwrap_or_else(|| MatrixSource::default_for(n));

    // fail on an unavailable matrix before simulating
    let exact = match source {
        MatrixSource::Exact => {
            if n as usize > MAX_N {
                return Err(Error::VariantUnavailable(format!(
                    "exact covariance needs n <= {MAX_N}, got {n}"
                )));
            }
            let t = MomentTable::compute(p, (n as usize).max(2), Precision::Standard)?;
            let n = n as usize;
            Some((
                SymMatrix2::new(t.var_s(n)?, t.cov_sk(n)?, t.var_k(n)?),
                [t.mean_s(n)?, t.mean_k(n)?],
            ))
        }
        _ => None,
    };
    let asymptotic = match source {
        MatrixSource::Asymptotic => {
            let m = params(p, None)?;
            if !m.is_symmetric() {
                return Err(Error::VariantUnavailable(
                    "asymptotic covariance matrix is only available at p = 1/2".into(),
                ));
            }
            let f = SymmetricFluctuations::new(Truncation::default())?;
            Some(sigma_matrix(&m, &f, n as f64, SigmaVariant::Unified)?)
        }
        _ => None,
    };

    let xs: Vec<[f64; 2]> = samples(n, p, trials, seed, threads)?
        .iter()
        .map(|s| [s.size as f64, s.kpl as f64])
        .collect();
    let mut raw = Moments::<2>::default();
    xs.iter().for_each(|&x| raw.push(x));

    let (matrix, center) = match (exact, asymptotic) {
        (Some(e), _) => e,
        (_, Some(sigma)) => (sigma, raw.mean),
        _ => (
            SymMatrix2::new(raw.var(0), raw.cov(0, 1), raw.var(1)),
            raw.mean,
        ),
    };
    let w = matrix.inv_sqrt()?;

    let white: Vec<[f64; 2]> = xs
        .iter()
        .map(|x| w.apply([x[0] - center[0], x[1] - center[1]]))
        .collect();
    let mut m = Moments::<2>::default();
    white.iter().for_each(|&x| m.push(x));
    let whitened_cov = if source == MatrixSource::Exact {
        let t = m.count as f64;
        let about_zero = |i: usize, j: usize| m.co[i][j] / t + m.mean[i] * m.mean[j];
        SymMatrix2::new(about_zero(0, 0), about_zero(0, 1), about_zero(1, 1))
    } else {
        SymMatrix2::new(m.var(0), m.cov(0, 1), m.var(1))
    };
    let coords = |i: usize| white.iter().map(|x| x[i]).collect::<Vec<_>>();

    Ok(WhitenReport {
        n,
        p,
        trials,
        seed,
        source,
        matrix,
        center,
        whitened_cov,
        max_offdiag: whitened_cov.b.abs(),
        identity_distance: whitened_cov.max_abs_diff(&SymMatrix2::IDENTITY),
        skewness: [m.skewness(0), m.skewness(1)],
        excess_kurtosis: [m.excess_kurtosis(0), m.excess_kurtosis(1)],
        ks_distance: [ks_distance(&coords(0)), ks_distance(&coords(1))],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_source_gives_identity() {
        let r = whiten(300, 0.3, 500, 2, Some(MatrixSource::Sample), 0).unwrap();
        assert!(r.identity_distance < 1e-10);
        assert_eq!(r.source, MatrixSource::Sample);
    }

    #[test]
    fn two_keys_are_singular() {
        assert!(matches!(
            whiten(2, 0.5, 1000, 2, Some(MatrixSource::Sample), 0),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn exact_source_whitens_moderate_n() {
        let r = whiten(500, 0.5, 4000, 13, None, 0).unwrap();
        assert_eq!(r.source, MatrixSource::Exact);
        assert!(r.identity_distance < 0.1, "{r:?}");
        assert!(r.ks_distance[0] < 0.05 && r.ks_distance[1] < 0.05);
    }

    #[test]
    fn asymptotic_source_needs_one_half() {
        assert!(matches!(
            whiten(500, 0.3, 200, 1, Some(MatrixSource::Asymptotic), 0),
            Err(Error::VariantUnavailable(_))
        ));
        let r = whiten(2000, 0.5, 2000, 1, Some(MatrixSource::Asymptotic), 0).unwrap();
        assert!(r.identity_distance < 0.15, "{r:?}");
        assert!(matches!(
            whiten(50_000, 0.5, 200, 1, Some(MatrixSource::Exact), 0),
            Err(Error::VariantUnavailable(_))
        ));
        assert_eq!(MatrixSource::default_for(50_000), MatrixSource::Asymptotic);
    }

    #[test]
    fn report_csv() {
        let r = whiten(100, 0.5, 200, 1, None, 1).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf, Some("x=1")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("source,exact\n"));
        assert_eq!(text.lines().count(), 2 + 15 + 6);
    }
}
