//! Exact moments of size, key path length and node path length for every
//! `n` up to a bound, and their Poisson transforms.

mod binomial;
mod io;
mod poisson;
mod table;

pub use io::{MomentRow, CSV_HEADER};
pub use poisson::{poisson_eval, truncation, PoissonModel, PoissonSeries};
pub use table::{MomentKind, MomentTable, Precision, MAX_N};
