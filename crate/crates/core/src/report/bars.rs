//! Bar-chart data for journals split at an elasticity threshold.

use serde::Serialize;

use crate::elasticity::{fit_demand, ElasticityProfile};
use crate::ingest::Region;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarGroup {
    pub label: String,
    pub elasticity: f64,
    pub values: Vec<f64>,
}

/// A vertical separator drawn after `after` groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divider {
    pub after: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarChart {
    pub title: String,
    pub y_label: String,
    pub series: Vec<String>,
    pub groups: Vec<BarGroup>,
    pub divider: Option<Divider>,
}

fn sorted_by_elasticity(
    profiles: &[ElasticityProfile],
    region: Region,
    keep: impl Fn(f64) -> bool,
) -> Vec<(&ElasticityProfile, f64)> {
    let mut picked: Vec<_> = profiles
        .iter()
        .filter(|p| p.region == region)
        .filter_map(|p| p.mean_elasticity.filter(|&e| keep(e)).map(|e| (p, e)))
        .collect();
    picked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.journal_id.cmp(&b.0.journal_id)));
    picked
}

/// PUB̄ next to PUB_opt for journals with ē < 0, ascending in ē and split
/// at ē = −1.
pub fn negative_elasticity_bars(profiles: &[ElasticityProfile], region: Region) -> BarChart {
    let picked = sorted_by_elasticity(profiles, region, |e| e < 0.0);
    let groups: Vec<BarGroup> = picked
        .iter()
        .filter_map(|(p, e)| {
            let opt = fit_demand(p).ok()?.pub_opt()?;
            Some(BarGroup {
                label: p.journal_id.clone(),
                elasticity: *e,
                values: vec![p.mean_pub, opt],
            })
        })
        .collect();
    let split = groups.iter().take_while(|g| g.elasticity <= -1.0).count();
    BarChart {
        title: format!("{region}: mean PUB and PUB_opt, e < 0"),
        y_label: "publications per year".to_string(),
        series: vec!["mean PUB".to_string(), "PUB_opt".to_string()],
        divider: (split > 0 && split < groups.len()).then(|| Divider {
            after: split,
            label: "e = -1".to_string(),
        }),
        groups,
    }
}

/// PUB̄ for journals with ē > 0, ascending in ē and split at ē = 1.
pub fn positive_elasticity_bars(profiles: &[ElasticityProfile], region: Region) -> BarChart {
    let picked = sorted_by_elasticity(profiles, region, |e| e > 0.0);
    let groups: Vec<BarGroup> = picked
        .iter()
        .map(|(p, e)| BarGroup {
            label: p.journal_id.clone(),
            elasticity: *e,
            values: vec![p.mean_pub],
        })
        .collect();
    let split = groups.iter().take_while(|g| g.elasticity < 1.0).count();
    BarChart {
        title: format!("{region}: mean PUB, e > 0"),
        y_label: "publications per year".to_string(),
        series: vec!["mean PUB".to_string()],
        divider: (split > 0 && split < groups.len()).then(|| Divider {
            after: split,
            label: "e = 1".to_string(),
        }),
        groups,
    }
}
