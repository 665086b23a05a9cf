use thiserror::Error;

/// Errors raised by the trie, moment, asymptotic and simulation engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidParameter(String),

    #[error("keys {first} and {second} agree on all {depth} stored bits; supply longer prefixes")]
    KeyExhausted {
        first: usize,
        second: usize,
        depth: usize,
    },

    #[error("splitting recursion exceeded max depth {max_depth}{}", trial_suffix(*.trial))]
    DepthGuardExceeded {
        max_depth: usize,
        trial: Option<u64>,
    },

    #[error("index {index} out of range (table holds n <= {n_max})")]
    IndexOutOfRange { index: usize, n_max: usize },

    #[error("variance is zero at n = {0}; correlation undefined")]
    DegenerateVariance(usize),

    #[error("|z| = {modulus} exceeds the Poisson series guard {guard}")]
    GuardExceeded { modulus: f64, guard: f64 },

    #[error("ratio {r}/{l} does not match log p / log q = {actual}")]
    RatioSpecMismatch { r: u32, l: u32, actual: f64 },

    #[error("gamma/digamma pole at z = {0}")]
    Pole(f64),

    #[error("{series} did not converge within {limit} terms (last term {last:e})")]
    TruncationNotConverged {
        series: &'static str,
        limit: usize,
        last: f64,
    },

    #[error("matrix is not positive definite (a = {a}, det = {det})")]
    NotPositiveDefinite { a: f64, det: f64 },

    #[error("{0}")]
    VariantUnavailable(String),

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn trial_suffix(trial: Option<u64>) -> String {
    match trial {
        Some(t) => format!(" (trial {t})"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::TruncationNotConverged { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::DepthGuardExceeded { .. }
                | Error::DegenerateVariance(_)
                | Error::GuardExceeded { .. }
                | Error::Pole(_)
                | Error::ZeroVariance
                | Error::KeyExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("p must be in (0,1)".into()))
    }
}
