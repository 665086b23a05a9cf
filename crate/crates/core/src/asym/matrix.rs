use serde::{Deserialize, Serialize};

use super::coeffs::SymmetricFluctuations;
use super::params::ModelParams;
use crate::error::{Error, Result};

/// The symmetric matrix [[a, b], [b, c]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl SymMatrix2 {
    pub const IDENTITY: SymMatrix2 = SymMatrix2 {
        a: 1.0,
        b: 0.0,
        c: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        SymMatrix2 { a, b, c }
    }

    pub fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.det() > 0.0
    }

    fn check_pd(&self) -> Result<f64> {
        let det = self.det();
        if self.a > 0.0 && det > 0.0 && det.is_finite() {
            Ok(det)
        } else {
            Err(Error::NotPositiveDefinite { a: self.a, det })
        }
    }

    /// The unique positive-definite square root,
    /// (M + √D·I) / √(a + c + 2√D) with D = det M.
    pub fn sqrt(&self) -> Result<SymMatrix2> {
        let root_d = self.check_pd()?.sqrt();
        let s = (self.a + self.c + 2.0 * root_d).sqrt();
        Ok(SymMatrix2 {
            a: (self.a + root_d) / s,
            b: self.b / s,
            c: (self.c + root_d) / s,
        })
    }

    /// Inverse of [`sqrt`](Self::sqrt):
    /// [[c + √D, -b], [-b, a + √D]] / (√D · √(a + c + 2√D)).
    pub fn inv_sqrt(&self) -> Result<SymMatrix2> {
        let root_d = self.check_pd()?.sqrt();
        let s = root_d * (self.a + self.c + 2.0 * root_d).sqrt();
        Ok(SymMatrix2 {
            a: (self.c + root_d) / s,
            b: -self.b / s,
            c: (self.a + root_d) / s,
        })
    }

    /// Matrix product; not symmetric in general.
    pub fn mul(&self, other: &SymMatrix2) -> [[f64; 2]; 2] {
        [
            [
                self.a * other.a + self.b * other.b,
                self.a * other.b + self.b * other.c,
            ],
            [
                self.b * other.a + self.c * other.b,
                self.b * other.b + self.c * other.c,
            ],
        ]
    }

    /// W M W for symmetric W, which is symmetric again.
    pub fn sandwich(&self, m: &SymMatrix2) -> SymMatrix2 {
        let wm = self.mul(m);
        SymMatrix2 {
            a: wm[0][0] * self.a + wm[0][1] * self.b,
            b: wm[0][0] * self.b + wm[0][1] * self.c,
            c: wm[1][0] * self.b + wm[1][1] * self.c,
        }
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.b * v[0] + self.c * v[1]]
    }

    pub fn scale(&self, s: f64) -> SymMatrix2 {
        SymMatrix2 {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
        }
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &SymMatrix2) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }
}

pub fn sqrt2(m: &SymMatrix2) -> Result<SymMatrix2> {
    m.sqrt()
}

pub fn invsqrt2(m: &SymMatrix2) -> Result<SymMatrix2> {
    m.inv_sqrt()
}

/// How the asymptotic covariance matrix of (S_n, K_n) is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaVariant {
    /// n·[[g1(n), g2(n)], [g2(n), g3(n)]], available at p = 1/2.
    Symmetric,
    /// The same with λ ln n + g3(n) in the lower-right entry.
    Unified,
}

impl std::str::FromStr for SigmaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(SigmaVariant::Symmetric),
            "unified" => Ok(SigmaVariant::Unified),
            other => Err(Error::InvalidParameter(format!(
                "variant must be symmetric or unified, got {other}"
            ))),
        }
    }
}

/// Asymptotic covariance matrix of (S_n, K_n).
///
/// Only p = 1/2 has all three fluctuations available, so both variants
/// refuse other p.
pub fn sigma_matrix(
    params: &ModelParams,
    fluct: &SymmetricFluctuations,
    n: f64,
    variant: SigmaVariant,
) -> Result<SymMatrix2> {
    if !params.is_symmetric() {
        return Err(Error::VariantUnavailable(format!(
            "the {variant:?} covariance matrix needs the size and key path length \
             variance fluctuations, which are only available at p = 1/2"
        )));
    }
    if n < 2.0 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let extra = match variant {
        SigmaVariant::Symmetric => 0.0,
        SigmaVariant::Unified => params.lambda * n.ln(),
    };
    Ok(SymMatrix2 {
        a: fluct.g1.eval(n),
        b: fluct.g2.eval(n),
        c: extra + fluct.g3.eval(n),
    }
    .scale(n))
}
