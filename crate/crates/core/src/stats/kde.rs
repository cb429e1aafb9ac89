use std::f64::consts::PI;

use serde::Serialize;

use super::{check_finite, quantile_type7, sample_sd, StatsError};

/// Gaussian density estimate sampled on an even grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoidal integral of the sampled density.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(g, d)| 0.5 * (g[1] - g[0]) * (d[0] + d[1]))
            .sum()
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }
}

/// Silverman's rule `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`.
///
/// When the IQR is zero but the spread is not, `sd` alone is used so the
/// bandwidth stays positive.
pub fn silverman_bandwidth(x: &[f64]) -> Result<f64, StatsError> {
    if x.len() < 2 {
        return Err(StatsError::TooFew { min: 2, got: x.len() });
    }
    check_finite(x)?;
    let sd = sample_sd(x);
    if sd.is_nan() || sd <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_type7(&sorted, 0.75) - quantile_type7(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (x.len() as f64).powf(-0.2))
}

/// Gaussian KDE on `grid_size` points spanning `[min - 4h, max + 4h]`.
pub fn kde(x: &[f64], grid_size: usize) -> Result<DensityCurve, StatsError> {
    if grid_size < 16 {
        return Err(StatsError::GridTooSmall(grid_size));
    }
    let h = silverman_bandwidth(x)?;
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let start = lo - 4.0 * h;
    let step = (hi - lo + 8.0 * h) / (grid_size - 1) as f64;
    let norm = 1.0 / (x.len() as f64 * h * (2.0 * PI).sqrt());
    let grid: Vec<f64> = (0..grid_size).map(|i| start + step * i as f64).collect();
    let density = grid
        .iter()
        .map(|&g| {
            norm * x
                .iter()
                .map(|&v| {
                    let u = (g - v) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}
