use serde::Serialize;

use super::{check_finite, StatsError};

/// Location summary used for box plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub lower_fence: f64,
    pub upper_fence: f64,
}

impl Descriptive {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Type-7 quantile of an ascending slice: linear interpolation at
/// zero-based position `p * (n - 1)`.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn describe(x: &[f64]) -> Result<Descriptive, StatsError> {
    if x.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(x)?;
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_type7(&sorted, 0.25);
    let q3 = quantile_type7(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok(Descriptive {
        n: x.len(),
        mean: super::mean(x),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        median: quantile_type7(&sorted, 0.5),
        q1,
        q3,
        lower_fence: q1 - 1.5 * iqr,
        upper_fence: q3 + 1.5 * iqr,
    })
}
