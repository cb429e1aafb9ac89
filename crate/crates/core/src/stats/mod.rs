//! Statistical kernels used for screening and summarizing journal series.

mod describe;
mod kde;
mod shapiro;
pub mod special;
mod spearman;

pub use describe::{describe, quantile_type7, Descriptive};
pub use kde::{kde, silverman_bandwidth, DensityCurve};
pub use shapiro::{shapiro_wilk, NormalityResult};
pub use spearman::{mid_ranks, spearman, CorrelationResult};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} observations, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("sample size {0} outside [3, 5000]")]
    SampleSize(usize),
    #[error("constant input: correlation undefined")]
    ConstantInput,
    #[error("zero variance")]
    ZeroVariance,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("grid size {0} below 16")]
    GridTooSmall(usize),
    #[error("empty input")]
    Empty,
}

pub(crate) fn check_finite(x: &[f64]) -> Result<(), StatsError> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub(crate) fn sample_sd(x: &[f64]) -> f64 {
    let m = mean(x);
    let ss: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (x.len() as f64 - 1.0)).sqrt()
}
