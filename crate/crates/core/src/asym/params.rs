use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Largest numerator/denominator the ratio detector will propose.
pub const MAX_RATIO_TERM: u32 = 64;

const RATIO_TOLERANCE: f64 = 1e-12;

/// Whether log p / log q is a ratio of small integers.
///
/// `Rational { r, l }` means log p / log q = r / l; the fluctuations are
/// then periodic in log n with period |log p| / r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RatioSpec {
    Rational { r: u32, l: u32 },
    Irrational,
}

impl std::fmt::Display for RatioSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RatioSpec::Rational { r, l } => write!(f, "{r}/{l}"),
            RatioSpec::Irrational => f.write_str("irrational"),
        }
    }
}

impl std::str::FromStr for RatioSpec {
    type Err = Error;

    /// Accepts `r/l` or `irrational`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "irrational" {
            return Ok(RatioSpec::Irrational);
        }
        let bad = || Error::InvalidParameter(format!("ratio must be r/l or irrational, got {s}"));
        let (r, l) = s.split_once('/').ok_or_else(bad)?;
        let r: u32 = r.trim().parse().map_err(|_| bad())?;
        let l: u32 = l.trim().parse().map_err(|_| bad())?;
        if r == 0 || l == 0 {
            return Err(bad());
        }
        Ok(RatioSpec::Rational { r, l })
    }
}

/// Where a [`ModelParams::ratio`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioSource {
    Supplied,
    Detected,
}

/// Bit-source constants shared by the asymptotic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub q: f64,
    /// Entropy in nats.
    pub h: f64,
    /// Variance slope pq·ln²(p/q)/h³.
    pub lambda: f64,
    /// The same constant as ((p ln²p + q ln²q) − h²)/h³.
    pub lambda_alt: f64,
    pub ratio: RatioSpec,
    pub ratio_source: RatioSource,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn ratio_error(p: f64, r: u32, l: u32) -> f64 {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (r as f64 * lq - l as f64 * lp).abs() / lp.abs()
}

/// Continued-fraction search for log p / log q = r / l with r, l <= 64.
pub fn detect_ratio(p: f64) -> Result<RatioSpec> {
    check_probability(p)?;
    let x = p.ln() / (1.0 - p).ln();
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if h2 > MAX_RATIO_TERM as u64 || k2 > MAX_RATIO_TERM as u64 {
            break;
        }
        if h2 > 0 && ratio_error(p, h2 as u32, k2 as u32) < RATIO_TOLERANCE {
            return Ok(RatioSpec::Rational {
                r: h2 as u32,
                l: k2 as u32,
            });
        }
        let frac = y - a as f64;
        if frac < 1e-15 {
            break;
        }
        y = frac.recip();
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    Ok(RatioSpec::Irrational)
}

/// Builds the constants for `p`. A supplied rational ratio is checked
/// against log p / log q; without one the detector's choice is used and
/// marked as detected.
pub fn params(p: f64, ratio: Option<RatioSpec>) -> Result<ModelParams> {
    check_probability(p)?;
    let q = 1.0 - p;
    let (lp, lq) = (p.ln(), q.ln());
    let h = -p * lp - q * lq;
    let lpq = lp - lq;
    let lambda = p * q * lpq * lpq / (h * h * h);
    let lambda_alt = ((p * lp * lp + q * lq * lq) - h * h) / (h * h * h);

    let (ratio, ratio_source) = match ratio {
        Some(RatioSpec::Rational { r, l }) => {
            if r == 0 || l == 0 || gcd(r, l) != 1 {
                return Err(Error::InvalidParameter(format!(
                    "ratio {r}/{l} must be in lowest terms"
                )));
            }
            if ratio_error(p, r, l) >= RATIO_TOLERANCE {
                return Err(Error::RatioSpecMismatch {
                    r,
                    l,
                    actual: lp / lq,
                });
            }
            (RatioSpec::Rational { r, l }, RatioSource::Supplied)
        }
        Some(RatioSpec::Irrational) => (RatioSpec::Irrational, RatioSource::Supplied),
        None => (detect_ratio(p)?, RatioSource::Detected),
    };

    Ok(ModelParams {
        p,
        q,
        h,
        lambda,
        lambda_alt,
        ratio,
        ratio_source,
    })
}

impl ModelParams {
    pub fn is_symmetric(&self) -> bool {
        self.p == 0.5
    }

    /// Imaginary part of the k = 1 exponent, 2rπ/|ln p|; `None` when
    /// log p / log q is irrational and only the mean term survives.
    pub fn omega(&self) -> Option<f64> {
        match self.ratio {
            RatioSpec::Rational { r, .. } => {
                Some(2.0 * r as f64 * std::f64::consts::PI / self.p.ln().abs())
            }
            RatioSpec::Irrational => None,
        }
    }
}
