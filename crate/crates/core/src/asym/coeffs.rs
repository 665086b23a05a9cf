use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::numeric::{cdigamma, cgamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Terms of an ℓ-series are summed at least this far before the stopping
/// test applies (some early terms vanish identically at k = 0).
const MIN_TERMS: usize = 8;

/// Which fluctuation a coefficient set describes: variance of size (g1),
/// covariance of size and key path length (g2), variance of key path
/// length (g3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    G1,
    G2,
    G3,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::G1 => "g1",
            Family::G2 => "g2",
            Family::G3 => "g3",
        })
    }
}

/// Series cutoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// Most ℓ-terms summed before giving up.
    pub l_max: usize,
    /// Harmonics |j| <= j_max in the convolution sum.
    pub j_max: usize,
    /// Harmonics |k| <= k_max kept in a fluctuation.
    pub k_max: usize,
    /// A series stops once a term falls below tol · max(1, |partial sum|).
    pub tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            l_max: 2000,
            j_max: 40,
            k_max: 5,
            tol: 1e-18,
        }
    }
}

/// Sums `term(ℓ)` for ℓ = `start`.. until a term is negligible.
fn sum_series(
    name: &'static str,
    start: usize,
    trunc: &Truncation,
    mut term: impl FnMut(usize) -> Complex64,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for l in start..=trunc.l_max.max(start) {
        let t = term(l);
        sum += t;
        last = t.norm();
        if l >= start + MIN_TERMS && last < trunc.tol * sum.norm().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::TruncationNotConverged {
        series: name,
        limit: trunc.l_max,
        last,
    })
}

/// χ_k = 2kπi / ln 2, the exponents at p = 1/2.
fn chi_sym(k: i64) -> Complex64 {
    Complex64::new(0.0, 2.0 * k as f64 * PI / LN_2)
}

fn sign(l: usize) -> f64 {
    if l.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient `k` of the size-variance fluctuation at p = 1/2.
pub fn g1_sym(k: i64, trunc: &Truncation) -> Result<Complex64> {
    let c = chi_sym(k);
    let one = Complex64::new(1.0, 0.0);
    // Γ(χ-1)χ(χ+1)² written without the removable pole at χ = 0
    let lead = -cgamma(c + 1.0)? * (c + 1.0) * (c + 1.0) / ((c - one) * (4.0 * LN_2));
    // a = Γ(χ+ℓ)/(ℓ+1)!
    let mut a = cgamma(c + 1.0)? / 2.0;
    let series = sum_series("g1 symmetric series", 1, trunc, |l| {
        let lf = l as f64;
        let t = a * sign(l) * lf * (lf * (c + lf) - 1.0) / (2f64.powi(l as i32) - 1.0);
        a = a * (c + lf) / (lf + 2.0);
        t
    })?;
    Ok(lead + series * (2.0 / LN_2))
}

/// Coefficient `k` of the size/key-path-length covariance fluctuation at
/// p = 1/2.
pub fn g2_sym(k: i64, trunc: &Truncation) -> Result<Complex64> {
    let c = chi_sym(k);
    let lead = if k == 0 {
        Complex64::new((LN_2 - 0.25) / LN_2, 0.0)
    } else {
        cgamma(c)? * (1.0 - (c * c + c + 4.0) / Complex64::new(2.0, 0.0).powc(c + 2.0)) / LN_2
    };
    let mut a = cgamma(c + 1.0)? / 2.0;
    let series = sum_series("g2 symmetric series", 1, trunc, |l| {
        let lf = l as f64;
        let poly = lf * (2.0 * lf + 1.0) * (c + lf) - (lf + 1.0) * (lf + 1.0);
        let t = a * sign(l) * poly / (2f64.powi(l as i32) - 1.0);
        a = a * (c + lf) / (lf + 2.0);
        t
    })?;
    Ok(lead + series / LN_2)
}

/// Coefficient `k` of the key-path-length variance fluctuation at p = 1/2.
pub fn g3_sym(k: i64, trunc: &Truncation) -> Result<Complex64> {
    let c = chi_sym(k);
    let lead = if k == 0 {
        Complex64::new((LN_2 + 0.25) / LN_2, 0.0)
    } else {
        cgamma(c)? * (1.0 - (c * c - c + 4.0) / Complex64::new(2.0, 0.0).powc(c + 2.0)) / LN_2
    };
    // b = Γ(χ+ℓ)/ℓ!
    let mut b = cgamma(c + 1.0)?;
    let series = sum_series("g3 symmetric series", 1, trunc, |l| {
        let lf = l as f64;
        let t = b * sign(l) * (lf * (c + lf - 1.0) - 1.0) / (2f64.powi(l as i32) - 1.0);
        b = b * (c + lf) / (lf + 1.0);
        t
    })?;
    Ok(lead + series * (2.0 / LN_2))
}

/// Coefficient `k` of the covariance fluctuation for any p.
///
/// Uses χ_k = 2rkπi/|ln p|. The convolution over harmonics j is present
/// only when log p / log q is rational; otherwise only k = 0 exists.
pub fn g2_general(params: &ModelParams, k: i64, trunc: &Truncation) -> Result<Complex64> {
    let (p, q, h) = (params.p, params.q, params.h);
    let omega = match params.omega() {
        Some(w) => w,
        None if k == 0 => 0.0,
        None => {
            return Err(Error::VariantUnavailable(
                "log p / log q is irrational: only k = 0 exists".into(),
            ))
        }
    };
    let chi = |j: i64| Complex64::new(0.0, j as f64 * omega);
    let c = chi(k);
    let two = Complex64::new(2.0, 0.0);

    let first = if k == 0 {
        Complex64::new((LN_2 - 0.5) / h, 0.0)
    } else {
        cgamma(c)? / h * (1.0 - (c + 2.0) / two.powc(c + 1.0))
    };

    let mut conv = Complex64::new(0.0, 0.0);
    if params.omega().is_some() {
        let j_max = trunc.j_max as i64;
        let mut edge = 0.0f64;
        for j in (-j_max..=j_max).filter(|&j| j != 0) {
            let cj = chi(j);
            let t = cgamma(chi(k - j) + 1.0)? * (cj - 1.0) * cgamma(cj)?;
            if j.abs() == j_max {
                edge = edge.max(t.norm());
            }
            conv += t;
        }
        if edge > trunc.tol * conv.norm().max(1.0) {
            return Err(Error::TruncationNotConverged {
                series: "g2 harmonic convolution",
                limit: trunc.j_max,
                last: edge,
            });
        }
    }
    let conv = -conv / (h * h);

    let second_moment = p * p.ln().powi(2) + q * q.ln().powi(2);
    let digamma = cgamma(c + 1.0)? / (h * h)
        * (EULER_GAMMA + 1.0 + cdigamma(c + 1.0)? - second_moment / (2.0 * h));

    // a = Γ(χ+ℓ-1)/ℓ!
    let mut a = cgamma(c + 1.0)? / 2.0;
    let tail = sum_series("g2 general series", 2, trunc, |l| {
        let lf = l as f64;
        let (pl, ql) = (p.powi(l as i32), q.powi(l as i32));
        let weight = sign(l) * (pl + ql) / (1.0 - pl - ql);
        let t = a * weight * (2.0 * lf * lf - 2.0 * lf + 1.0 + c * (2.0 * lf - 1.0));
        a = a * (c + lf - 1.0) / (lf + 1.0);
        t
    })? / h;

    Ok(first + conv - digamma + tail)
}

/// Coefficients g_k, k = -k_max..=k_max, of one periodic fluctuation
/// Σ g_k n^{-χ_k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    pub family: Family,
    pub k_max: usize,
    /// Index `k + k_max` holds g_k.
    pub values: Vec<Complex64>,
    /// Imaginary part of χ_1; zero when only g_0 is present.
    pub omega: f64,
    pub trunc: Truncation,
}

impl FourierCoeffs {
    fn from_nonnegative(
        family: Family,
        omega: f64,
        trunc: Truncation,
        mut coeff: impl FnMut(i64) -> Result<Complex64>,
    ) -> Result<Self> {
        let k_max = trunc.k_max;
        let pos = (0..=k_max as i64)
            .map(&mut coeff)
            .collect::<Result<Vec<_>>>()?;
        let mut values: Vec<Complex64> = pos[1..].iter().rev().map(|z| z.conj()).collect();
        values.push(Complex64::new(pos[0].re, 0.0));
        values.extend_from_slice(&pos[1..]);
        Ok(FourierCoeffs {
            family,
            k_max,
            values,
            omega,
            trunc,
        })
    }

    /// The p = 1/2 coefficients of `family`.
    pub fn symmetric(family: Family, trunc: Truncation) -> Result<Self> {
        let f = match family {
            Family::G1 => g1_sym,
            Family::G2 => g2_sym,
            Family::G3 => g3_sym,
        };
        Self::from_nonnegative(family, 2.0 * PI / LN_2, trunc, |k| f(k, &trunc))
    }

    /// The covariance coefficients for general p; a single constant when
    /// log p / log q is irrational.
    pub fn g2(params: &ModelParams, trunc: Truncation) -> Result<Self> {
        match params.omega() {
            Some(omega) => {
                Self::from_nonnegative(Family::G2, omega, trunc, |k| g2_general(params, k, &trunc))
            }
            None => Self::constant(Family::G2, g2_general(params, 0, &trunc)?.re, trunc),
        }
    }

    /// A fluctuation that is the constant `g0`.
    pub fn constant(family: Family, g0: f64, trunc: Truncation) -> Result<Self> {
        Ok(FourierCoeffs {
            family,
            k_max: 0,
            values: vec![Complex64::new(g0, 0.0)],
            omega: 0.0,
            trunc: Truncation { k_max: 0, ..trunc },
        })
    }

    /// g_k, zero beyond the truncation.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(k + self.k_max as i64) as usize]
        }
    }

    /// g_0 + 2 Re Σ_{k=1}^{k_max} g_k exp(-χ_k ln n).
    pub fn eval(&self, n: f64) -> f64 {
        let x = n.ln();
        let mut s = self.get(0).re;
        for k in 1..=self.k_max as i64 {
            let phase = Complex64::new(0.0, -(k as f64) * self.omega * x).exp();
            s += 2.0 * (self.get(k) * phase).re;
        }
        s
    }

    /// `{family, omega, trunc, coefficients: [{k, re, im}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let coefficients: Vec<_> = (-(self.k_max as i64)..=self.k_max as i64)
            .map(|k| {
                let g = self.get(k);
                serde_json::json!({ "family": self.family, "k": k, "re": g.re, "im": g.im })
            })
            .collect();
        serde_json::json!({
            "family": self.family,
            "omega": self.omega,
            "trunc": self.trunc,
            "coefficients": coefficients,
        })
    }
}

/// Free-function form of [`FourierCoeffs::eval`].
pub fn fluct_eval(coeffs: &FourierCoeffs, n: f64) -> f64 {
    coeffs.eval(n)
}

/// The three p = 1/2 fluctuations and the limiting correlation of size and
/// key path length built from them.
#[derive(Debug, Clone)]
pub struct SymmetricFluctuations {
    pub g1: FourierCoeffs,
    pub g2: FourierCoeffs,
    pub g3: FourierCoeffs,
}

/// Mean, minimum and maximum of a function sampled over one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl PeriodStats {
    pub fn amplitude(&self) -> f64 {
        self.max - self.min
    }
}

impl SymmetricFluctuations {
    pub fn new(trunc: Truncation) -> Result<Self> {
        Ok(SymmetricFluctuations {
            g1: FourierCoeffs::symmetric(Family::G1, trunc)?,
            g2: FourierCoeffs::symmetric(Family::G2, trunc)?,
            g3: FourierCoeffs::symmetric(Family::G3, trunc)?,
        })
    }

    /// F(n) = g2(n) / √(g1(n) g3(n)), periodic in log₂ n.
    pub fn correlation(&self, n: f64) -> f64 {
        self.g2.eval(n) / (self.g1.eval(n) * self.g3.eval(n)).sqrt()
    }

    /// `(log₂ n, F(n))` at `points` equally spaced log₂ n in
    /// `[start, start + 1)`.
    pub fn correlation_samples(&self, start: f64, points: usize) -> Vec<(f64, f64)> {
        (0..points)
            .map(|i| {
                let x = start + i as f64 / points as f64;
                (x, self.correlation(x.exp2()))
            })
            .collect()
    }

    /// Statistics of F over one period; the mean is the trapezoid rule,
    /// which is spectrally accurate for a periodic integrand.
    pub fn correlation_period(&self, points: usize) -> PeriodStats {
        let samples = self.correlation_samples(10.0, points.max(1));
        let mut stats = PeriodStats {
            mean: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        };
        for &(_, f) in &samples {
            stats.mean += f;
            stats.min = stats.min.min(f);
            stats.max = stats.max.max(f);
        }
        stats.mean /= samples.len() as f64;
        stats
    }
}

/// F(n) with default truncations.
pub fn f_of_n(n: f64) -> Result<f64> {
    Ok(SymmetricFluctuations::new(Truncation::default())?.correlation(n))
}
