//! Sampling of the demand and marginal-revenue lines for plotting.

use serde::Serialize;
use thiserror::Error;

use crate::elasticity::{marginal_revenue, DemandModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("need at least 2 sample points, got {0}")]
    TooFewPoints(usize),
    #[error("pub_max must be positive, got {0}")]
    NonPositiveRange(f64),
    #[error("no revenue optimum to annotate: elasticity {0} is not negative")]
    NoOptimum(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    MeanPoint,
    MrZeroCrossing,
    DemandOptimum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub kind: AnnotationKind,
    pub label: String,
    pub pub_value: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSet {
    pub title: String,
    pub curves: Vec<Curve>,
    pub annotations: Vec<Annotation>,
}

impl CurveSet {
    pub fn curve(&self, label: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marks {
    /// Only the mean point.
    MeanOnly,
    /// Mean point plus the MR zero-crossing and the demand optimum.
    WithOptimum,
}

pub const DEMAND_LABEL: &str = "Demand";
pub const MR_LABEL: &str = "MR";

/// Samples both lines at `n_points` even steps over `[0, pub_max]`.
pub fn sample_curves(
    model: &DemandModel,
    title: impl Into<String>,
    pub_max: f64,
    n_points: usize,
    marks: Marks,
) -> Result<CurveSet, CurveError> {
    if n_points < 2 {
        return Err(CurveError::TooFewPoints(n_points));
    }
    if !(pub_max.is_finite() && pub_max > 0.0) {
        return Err(CurveError::NonPositiveRange(pub_max));
    }
    let mut annotations = vec![Annotation {
        kind: AnnotationKind::MeanPoint,
        label: "mean".to_string(),
        pub_value: model.mean_pub(),
        value: model.mean_jif(),
    }];
    if marks == Marks::WithOptimum {
        let opt = model.optimum().ok_or(CurveError::NoOptimum(model.elasticity()))?;
        annotations.push(Annotation {
            kind: AnnotationKind::MrZeroCrossing,
            label: "MR = 0".to_string(),
            pub_value: opt.pub_opt,
            value: 0.0,
        });
        annotations.push(Annotation {
            kind: AnnotationKind::DemandOptimum,
            label: "optimum".to_string(),
            pub_value: opt.pub_opt,
            value: opt.jif_opt,
        });
    }
    let step = pub_max / (n_points - 1) as f64;
    let xs: Vec<f64> = (0..n_points)
        .map(|i| if i == n_points - 1 { pub_max } else { step * i as f64 })
        .collect();
    let demand = xs.iter().map(|&p| (p, model.jif_at(p))).collect();
    let mr = xs.iter().map(|&p| (p, marginal_revenue(model, p))).collect();
    Ok(CurveSet {
        title: title.into(),
        curves: vec![
            Curve { label: DEMAND_LABEL.to_string(), points: demand },
            Curve { label: MR_LABEL.to_string(), points: mr },
        ],
        annotations,
    })
}
