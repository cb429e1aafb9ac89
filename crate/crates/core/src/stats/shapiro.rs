//! Shapiro–Wilk W test using Royston's AS R94 approximations.

use std::f64::consts::PI;

use serde::Serialize;

use super::special::{normal_quantile, normal_tail};
use super::{check_finite, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalityResult {
    pub w: f64,
    pub p_value: f64,
    pub n: usize,
}

const SMALL: f64 = 1e-19;

const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_19, 4.434_685, -2.706_056];
const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
const C4: [f64; 4] = [1.382_2, -0.778_57, 0.062_767, -0.002_032_2];
const C5: [f64; 4] = [-1.586_1, -0.310_82, -0.083_751, 0.003_891_5];
const C6: [f64; 3] = [-0.480_3, -0.082_676, 0.003_030_2];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Half-vector of weights for the upper order statistics, largest first.
fn weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    if n == 3 {
        return vec![0.5f64.sqrt()];
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25)))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;

    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first_tail, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first_tail..half {
        a[i] = -m[i] / fac;
    }
    a
}

/// Shapiro–Wilk statistic and p-value for `3 <= n <= 5000`.
pub fn shapiro_wilk(x: &[f64]) -> Result<NormalityResult, StatsError> {
    let n = x.len();
    if !(3..=5000).contains(&n) {
        return Err(StatsError::SampleSize(n));
    }
    check_finite(x)?;
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let range = sorted[n - 1] - sorted[0];
    if range < SMALL {
        return Err(StatsError::ZeroVariance);
    }

    let half = weights(n);
    // full antisymmetric coefficient vector over the sorted sample
    let mut coeffs = vec![0.0; n];
    for (i, &a) in half.iter().enumerate() {
        coeffs[i] = -a;
        coeffs[n - 1 - i] = a;
    }
    let an = n as f64;
    let sa = coeffs.iter().sum::<f64>() / an;
    let sx = sorted.iter().map(|v| v / range).sum::<f64>() / an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (c, v) in coeffs.iter().zip(&sorted) {
        let da = c - sa;
        let dx = v / range - sx;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    let ssassx = (ssa * ssx).sqrt();
    let one_minus_w = ((ssassx - sax) * (ssassx + sax) / (ssa * ssx)).max(0.0);
    let w = 1.0 - one_minus_w;

    let p_value = if n == 3 {
        (6.0 / PI * (w.sqrt().asin() - PI / 3.0)).clamp(0.0, 1.0)
    } else {
        let mut y = one_minus_w.ln();
        let (mean, sd) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Ok(NormalityResult { w, p_value: 1e-99, n });
            }
            y = -(gamma - y).ln();
            (poly(&C3, an), poly(&C4, an).exp())
        } else {
            let ln_n = an.ln();
            (poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        normal_tail((y - mean) / sd, true)
    };
    Ok(NormalityResult { w, p_value, n })
}
