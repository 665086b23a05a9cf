//! Numerical building blocks: compensated sums and complex Γ/ψ.

mod gamma;
mod sum;

pub use gamma::{cdigamma, cgamma};
pub use sum::{Accumulator, DoubleDouble, Neumaier};
