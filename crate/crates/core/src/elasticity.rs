//! Arc elasticity of publication capacity with respect to impact factor,
//! the linear demand model built on it, and the revenue-optimal point.
//!
//! A journal's demand is taken as linear through its mean point
//! `(PUB̄, JIF̄)` with point elasticity `ē` there:
//!
//! ```text
//! PUB = PUB̄ · (1 + ē · (JIF − JIF̄) / JIF̄)
//! JIF = slope · PUB + intercept,  slope = JIF̄ / (PUB̄ · ē),  intercept = JIF̄ · (1 − 1/ē)
//! MR  = 2 · slope · PUB + intercept
//! ```
//!
//! Revenue `PUB · JIF` peaks where `MR = 0`, which for `ē < 0` gives
//! `JIF_opt = (1/2 − 1/(2ē)) · JIF̄` and `PUB_opt = (1 − ē)/2 · PUB̄`.

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{JournalSeries, Region};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElasticityError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("journal {journal}: need at least 2 observations, got {got}")]
    TooFewObservations { journal: String, got: usize },
    #[error("averaged elasticity is undefined (no pair with a JIF change)")]
    UndefinedElasticity,
    #[error("averaged elasticity is zero: demand is vertical and the slope undefined")]
    ZeroElasticity,
    #[error("elasticity must be non-zero")]
    ZeroPointElasticity,
    #[error("markup needs a negative elasticity, got {0}")]
    NonNegativeElasticity(f64),
}

fn positive(name: &'static str, value: f64) -> Result<f64, ElasticityError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ElasticityError::NonPositive { name, value })
    }
}

/// Arc (midpoint) elasticity between two years:
/// `((PUBn − PUBn−1)/(JIFn − JIFn−1)) · ((JIFn + JIFn−1)/(PUBn + PUBn−1))`.
///
/// `None` when the impact factor did not change.
pub fn arc_elasticity(pub_prev: f64, pub_n: f64, jif_prev: f64, jif_n: f64) -> Result<Option<f64>, ElasticityError> {
    positive("pub_prev", pub_prev)?;
    positive("pub_n", pub_n)?;
    positive("jif_prev", jif_prev)?;
    positive("jif_n", jif_n)?;
    let jif_delta = jif_n - jif_prev;
    if jif_delta == 0.0 {
        return Ok(None);
    }
    Ok(Some((pub_n - pub_prev) / jif_delta * ((jif_n + jif_prev) / (pub_n + pub_prev))))
}

/// How observations are paired when a series has missing years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    /// Pair only observations from consecutive calendar years.
    #[default]
    AdjacentYearsOnly,
    /// Pair consecutive available observations, bridging gaps.
    AdjacentObservations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcElasticityPair {
    pub year_from: i32,
    pub year_to: i32,
    pub value: Option<f64>,
    pub jif_delta: f64,
    pub pub_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElasticityProfile {
    pub journal_id: String,
    pub region: Region,
    pub pairs: Vec<ArcElasticityPair>,
    pub mean_elasticity: Option<f64>,
    pub defined_count: usize,
    pub undefined_count: usize,
    pub mean_pub: f64,
    pub mean_jif: f64,
}

/// Per-pair arc elasticities and the series means.
///
/// `ē` averages only the defined pairs; pairs with no JIF change are
/// counted in `undefined_count`. Means run over every observation of the
/// series, so window the series beforehand to set the analysis period.
pub fn elasticity_profile(series: &JournalSeries, gap_policy: GapPolicy) -> Result<ElasticityProfile, ElasticityError> {
    let obs = series.observations();
    if obs.len() < 2 {
        return Err(ElasticityError::TooFewObservations {
            journal: series.id().to_string(),
            got: obs.len(),
        });
    }
    let mut pairs = Vec::with_capacity(obs.len() - 1);
    for w in obs.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        if gap_policy == GapPolicy::AdjacentYearsOnly && next.year - prev.year != 1 {
            continue;
        }
        pairs.push(ArcElasticityPair {
            year_from: prev.year,
            year_to: next.year,
            value: arc_elasticity(prev.pub_f64(), next.pub_f64(), prev.jif, next.jif)?,
            jif_delta: next.jif - prev.jif,
            pub_delta: next.pub_f64() - prev.pub_f64(),
        });
    }
    let defined: Vec<f64> = pairs.iter().filter_map(|p| p.value).collect();
    let mean_elasticity = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    let n = obs.len() as f64;
    Ok(ElasticityProfile {
        journal_id: series.id().to_string(),
        region: series.region(),
        defined_count: defined.len(),
        undefined_count: pairs.len() - defined.len(),
        pairs,
        mean_elasticity,
        mean_pub: obs.iter().map(|o| o.pub_f64()).sum::<f64>() / n,
        mean_jif: obs.iter().map(|o| o.jif).sum::<f64>() / n,
    })
}

/// The revenue-optimal operating point of a downward-sloping demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub jif_opt: f64,
    pub pub_opt: f64,
    /// `(JIF − MC)/JIF` at the mean elasticity.
    pub markup: f64,
}

/// Linear demand through the mean point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandModel {
    elasticity: f64,
    mean_pub: f64,
    mean_jif: f64,
    slope: f64,
    intercept: f64,
    optimum: Option<Optimum>,
}

impl DemandModel {
    pub fn from_means(elasticity: f64, mean_pub: f64, mean_jif: f64) -> Result<Self, ElasticityError> {
        if !elasticity.is_finite() {
            return Err(ElasticityError::UndefinedElasticity);
        }
        if elasticity == 0.0 {
            return Err(ElasticityError::ZeroElasticity);
        }
        positive("mean_pub", mean_pub)?;
        positive("mean_jif", mean_jif)?;
        let optimum = (elasticity < 0.0).then(|| Optimum {
            jif_opt: (0.5 - 1.0 / (2.0 * elasticity)) * mean_jif,
            pub_opt: (1.0 - elasticity) / 2.0 * mean_pub,
            markup: 1.0 / -elasticity,
        });
        Ok(Self {
            elasticity,
            mean_pub,
            mean_jif,
            slope: mean_jif / (mean_pub * elasticity),
            intercept: mean_jif * (1.0 - 1.0 / elasticity),
            optimum,
        })
    }

    pub fn elasticity(&self) -> f64 {
        self.elasticity
    }

    pub fn mean_pub(&self) -> f64 {
        self.mean_pub
    }

    pub fn mean_jif(&self) -> f64 {
        self.mean_jif
    }

    /// JIF per document along the demand curve.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn optimum(&self) -> Option<Optimum> {
        self.optimum
    }

    pub fn jif_opt(&self) -> Option<f64> {
        self.optimum.map(|o| o.jif_opt)
    }

    pub fn pub_opt(&self) -> Option<f64> {
        self.optimum.map(|o| o.pub_opt)
    }

    pub fn markup(&self) -> Option<f64> {
        self.optimum.map(|o| o.markup)
    }

    /// Demand curve read as JIF at a given publication count.
    pub fn jif_at(&self, pubs: f64) -> f64 {
        self.slope * pubs + self.intercept
    }

    /// Point elasticity `(dPUB/dJIF) · JIF/PUB` of the linear demand at `pubs`.
    pub fn point_elasticity_at(&self, pubs: f64) -> f64 {
        self.jif_at(pubs) / (self.slope * pubs)
    }
}

pub fn fit_demand(profile: &ElasticityProfile) -> Result<DemandModel, ElasticityError> {
    let e = profile.mean_elasticity.ok_or(ElasticityError::UndefinedElasticity)?;
    DemandModel::from_means(e, profile.mean_pub, profile.mean_jif)
}

/// Publication count demanded at `jif`; may be negative far from the mean.
pub fn demand_pub_at(model: &DemandModel, jif: f64) -> f64 {
    model.mean_pub * (1.0 + model.elasticity * (jif - model.mean_jif) / model.mean_jif)
}

pub fn marginal_revenue(model: &DemandModel, pubs: f64) -> f64 {
    2.0 * model.mean_jif / (model.mean_pub * model.elasticity) * pubs + model.intercept
}

/// `MR = JIF · (1 + 1/e)`.
pub fn mr_from_elasticity(jif: f64, e: f64) -> Result<f64, ElasticityError> {
    if e == 0.0 {
        return Err(ElasticityError::ZeroPointElasticity);
    }
    Ok(jif * (1.0 + 1.0 / e))
}

/// JIF–MC markup `1/(−e)` for `e < 0`.
pub fn markup(e: f64) -> Result<f64, ElasticityError> {
    if e < 0.0 {
        Ok(1.0 / -e)
    } else {
        Err(ElasticityError::NonNegativeElasticity(e))
    }
}

/// Total revenue (utility net of cost) `PUB · JIF`.
pub fn revenue(pubs: f64, jif: f64) -> f64 {
    pubs * jif
}

/// Half-up rounding of a publication count for display.
pub fn round_pub(pubs: f64) -> i64 {
    (pubs + 0.5).floor() as i64
}
