//! Poisson transforms of moment sequences.
//!
//! Replacing the fixed key count n by a Poisson(z) count turns a moment
//! sequence m_n into f(z) = e^{-z} Σ m_n z^n / n!. The covariance and
//! variance analyses work with these transforms and with the "Poissonized"
//! second-order quantities built from them.

use num_complex::Complex64;

use super::{MomentKind, MomentTable};
use crate::error::{Error, Result};

/// Terms retained at |z| = r: ⌈r + 12√r + 50⌉.
pub fn truncation(r: f64) -> usize {
    (r + 12.0 * r.sqrt() + 50.0).ceil() as usize
}

const TAIL_TOLERANCE: f64 = 1e-12;

/// Largest |z| for which [`truncation`] + 1 coefficients exist among
/// `len` (indices `0..len`); `None` when even z = 0 is out of reach.
fn guard_for(len: usize) -> Option<f64> {
    let last = len.checked_sub(1)? as f64;
    // z + 12√z + 50 <= last - 1
    let disc = 36.0 + last - 1.0 - 50.0;
    if disc < 36.0 {
        return None;
    }
    let s = disc.sqrt() - 6.0;
    Some((s * s).min(700.0))
}

/// A moment sequence prepared for Poisson-transform evaluation.
#[derive(Debug, Clone)]
pub struct PoissonSeries {
    coeffs: Vec<f64>,
    guard: Option<f64>,
}

impl PoissonSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let guard = guard_for(coeffs.len());
        PoissonSeries { coeffs, guard }
    }

    pub fn from_table(table: &MomentTable, kind: MomentKind) -> Self {
        Self::new(table.raw_sequence(kind))
    }

    /// Largest admissible |z|, or a negative value when none is.
    pub fn guard(&self) -> f64 {
        self.guard.unwrap_or(-1.0)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// e^{-z} Σ m_n z^n/n! (`derivative == 0`) or its z-derivative
    /// e^{-z} Σ (m_{n+1} - m_n) z^n/n! (`derivative == 1`).
    pub fn eval(&self, z: Complex64, derivative: u8) -> Result<Complex64> {
        if derivative > 1 {
            return Err(Error::InvalidParameter(format!(
                "derivative order must be 0 or 1, got {derivative}"
            )));
        }
        let r = z.norm();
        let guard = self.guard();
        if !(r <= guard) {
            return Err(Error::GuardExceeded { modulus: r, guard });
        }
        let terms = truncation(r);
        let coeff = |j: usize| -> f64 {
            if derivative == 0 {
                self.coeffs[j]
            } else {
                self.coeffs[j + 1] - self.coeffs[j]
            }
        };

        // t_j = e^{-r} z^j / j!, rescaled by e^{r - z} at the end
        let mut t = Complex64::new((-r).exp(), 0.0);
        let mut sum = t * coeff(0);
        for j in 1..=terms {
            t = t * z / j as f64;
            sum += t * coeff(j);
        }
        let scale = (Complex64::from(r) - z).exp();
        let value = sum * scale;
        let tail = (t * coeff(terms)).norm() * scale.norm();
        if tail > TAIL_TOLERANCE * value.norm().max(1.0) {
            return Err(Error::GuardExceeded { modulus: r, guard });
        }
        Ok(value)
    }

    /// [`eval`](Self::eval) on the real axis.
    pub fn eval_real(&self, z: f64, derivative: u8) -> Result<f64> {
        Ok(self.eval(Complex64::new(z, 0.0), derivative)?.re)
    }
}

/// Free-function form of [`PoissonSeries::eval`].
pub fn poisson_eval(series: &PoissonSeries, z: Complex64, derivative: u8) -> Result<Complex64> {
    series.eval(z, derivative)
}

/// Poisson transforms of the first and second moments of (S, K) and the
/// Poissonized variances and covariance built from them.
#[derive(Debug, Clone)]
pub struct PoissonModel {
    p: f64,
    f10: PoissonSeries,
    f01: PoissonSeries,
    f20: PoissonSeries,
    f02: PoissonSeries,
    f11: PoissonSeries,
}

impl PoissonModel {
    pub fn new(table: &MomentTable) -> Self {
        PoissonModel {
            p: table.p(),
            f10: PoissonSeries::from_table(table, MomentKind::S),
            f01: PoissonSeries::from_table(table, MomentKind::K),
            f20: PoissonSeries::from_table(table, MomentKind::S2),
            f02: PoissonSeries::from_table(table, MomentKind::K2),
            f11: PoissonSeries::from_table(table, MomentKind::SK),
        }
    }

    pub fn guard(&self) -> f64 {
        self.f10.guard()
    }

    /// Transform of E S_n (or its derivative).
    pub fn f10(&self, z: f64, derivative: u8) -> Result<f64> {
        self.f10.eval_real(z, derivative)
    }

    /// Transform of E K_n (or its derivative).
    pub fn f01(&self, z: f64, derivative: u8) -> Result<f64> {
        self.f01.eval_real(z, derivative)
    }

    pub fn f20(&self, z: f64) -> Result<f64> {
        self.f20.eval_real(z, 0)
    }

    pub fn f02(&self, z: f64) -> Result<f64> {
        self.f02.eval_real(z, 0)
    }

    pub fn f11(&self, z: f64) -> Result<f64> {
        self.f11.eval_real(z, 0)
    }

    /// f20 - f10² - z f10'².
    pub fn var_s(&self, z: f64) -> Result<f64> {
        let f = self.f10(z, 0)?;
        let d = self.f10(z, 1)?;
        Ok(self.f20(z)? - f * f - z * d * d)
    }

    /// f02 - f01² - z f01'².
    pub fn var_k(&self, z: f64) -> Result<f64> {
        let f = self.f01(z, 0)?;
        let d = self.f01(z, 1)?;
        Ok(self.f02(z)? - f * f - z * d * d)
    }

    /// f11 - f10 f01 - z f10' f01'.
    pub fn cov(&self, z: f64) -> Result<f64> {
        Ok(self.f11(z)?
            - self.f10(z, 0)? * self.f01(z, 0)?
            - z * self.f10(z, 1)? * self.f01(z, 1)?)
    }

    /// First toll of the covariance equation; vanishes identically at p = 1/2.
    pub fn h1(&self, z: f64) -> Result<f64> {
        let (p, q) = (self.p, 1.0 - self.p);
        let ds = self.f10(p * z, 1)? - self.f10(q * z, 1)?;
        let dk = self.f01(p * z, 1)? - self.f01(q * z, 1)?;
        Ok(p * q * z * ds * dk)
    }

    /// Second toll of the covariance equation; exponentially small for
    /// large z.
    pub fn h2(&self, z: f64) -> Result<f64> {
        let (p, q) = (self.p, 1.0 - self.p);
        let (pz, qz) = (p * z, q * z);
        let e = (-z).exp();
        let size_part = self.f10(pz, 0)?
            + self.f10(qz, 0)?
            + p * (1.0 - z) * self.f10(pz, 1)?
            + q * (1.0 - z) * self.f10(qz, 1)?;
        let kpl_part = (1.0 + z) * self.f01(pz, 0)? + (1.0 + z) * self.f01(qz, 0)?
            - p * z * z * self.f01(pz, 1)?
            - q * z * z * self.f01(qz, 1)?;
        Ok(z * e * size_part + e * kpl_part + z * e * (1.0 - (1.0 + z * z) * e))
    }
}
