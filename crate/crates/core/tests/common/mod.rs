//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the crate's statistics code.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

/// Mid-ranks by direct counting: 1 + #smaller + (#equal − 1) / 2.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let smaller = x.iter().filter(|&&v| v < xi).count() as f64;
            let equal = x.iter().filter(|&&v| v == xi).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    pearson(&brute_ranks(x), &brute_ranks(y))
}

/// Γ(k/2) for a positive integer k, from Γ(1/2) = √π, Γ(1) = 1 and
/// Γ(z + 1) = zΓ(z).
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k >= 1);
    let (mut z, mut g) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while z < k as f64 / 2.0 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Two-sided Student-t tail by Simpson integration of the density.
///
/// With x = √ν·tan θ the density integral over [0, t] becomes
/// c·∫ cos^(ν−1) θ dθ over [0, atan(t/√ν)], a smooth bounded integrand.
pub fn t_two_sided_by_integration(t: f64, df: u32) -> f64 {
    let nu = df as f64;
    let c = gamma_half_integer(df + 1) / (PI.sqrt() * gamma_half_integer(df));
    let upper = (t.abs() / nu.sqrt()).atan();
    let n = 4000;
    let h = upper / n as f64;
    let f = |theta: f64| theta.cos().powi(df as i32 - 1);
    let mut s = f(0.0) + f(upper);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    let central = c * s * h / 3.0;
    (1.0 - 2.0 * central).max(0.0)
}

/// Spearman p-value from the oracle ρ and the integrated t tail.
pub fn spearman_p_oracle(rho: f64, n: usize) -> f64 {
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as u32;
    let t = rho * ((n as f64 - 2.0) / (1.0 - rho * rho)).sqrt();
    t_two_sided_by_integration(t, df)
}

#[derive(Debug, serde::Deserialize)]
pub struct ShapiroGolden {
    pub name: String,
    pub x: Vec<f64>,
    pub w: f64,
    pub p: f64,
}

pub fn shapiro_goldens() -> Vec<ShapiroGolden> {
    let text = std::fs::read_to_string(fixture("shapiro_golden.json")).expect("golden file");
    serde_json::from_str(&text).expect("golden json")
}
