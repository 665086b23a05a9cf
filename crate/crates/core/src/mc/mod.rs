//! Monte-Carlo experiments on random tries: streaming joint moments,
//! whitening of (S, K), joint histograms and normality diagnostics.
//!
//! Trial `t` of a run with seed `s` always draws from stream `t` of `s`,
//! and accumulators are merged in trial order, so every result is
//! reproducible from its seed regardless of the thread count.

mod diag;
mod moments;
mod sim;
mod whiten;

pub use diag::{
    joint_histogram, ks_distance, marginal_stats, normal_cdf, normality_report, JointHistogram,
    MarginalStats, NormalityReport, HIST_RANGE, MIN_BINS, MIN_NORMALITY_TRIALS,
};
pub use moments::Moments;
pub use sim::{
    run, samples, trial_shape, with_threads, write_raw_csv, SampleSummary, CHUNK, MIN_TRIALS,
};
pub use whiten::{whiten, MatrixSource, WhitenReport};
