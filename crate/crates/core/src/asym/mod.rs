//! Asymptotic constants: entropy and variance slope of the bit source, the
//! Fourier coefficients of the periodic fluctuations in the variances and
//! covariance of size and key path length, and 2×2 matrix roots for
//! whitening.

mod coeffs;
mod matrix;
mod params;

pub use coeffs::{
    f_of_n, fluct_eval, g1_sym, g2_general, g2_sym, g3_sym, Family, FourierCoeffs, PeriodStats,
    SymmetricFluctuations, Truncation,
};
pub use matrix::{invsqrt2, sigma_matrix, sqrt2, SigmaVariant, SymMatrix2};
pub use params::{detect_ratio, params, ModelParams, RatioSource, RatioSpec, MAX_RATIO_TERM};
