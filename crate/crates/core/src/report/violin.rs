//! Distribution summaries of averaged elasticity per region.

use serde::Serialize;
use thiserror::Error;

use crate::elasticity::ElasticityProfile;
use crate::ingest::Region;
use crate::stats::{describe, kde, DensityCurve, Descriptive, StatsError};

pub const VIOLIN_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ViolinError {
    #[error("region {region}: need at least 2 defined elasticities, got {got}")]
    InsufficientSample { region: Region, got: usize },
    #[error("region {region}: {source}")]
    Stats { region: Region, source: StatsError },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionViolin {
    pub region: Region,
    pub stats: Descriptive,
    pub density: DensityCurve,
    pub e_min: f64,
    pub e_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinSummary {
    pub regions: Vec<RegionViolin>,
}

/// Box statistics and a density curve of ē for every region present in
/// `profiles`. Profiles with undefined ē are skipped.
pub fn violin_summary(profiles: &[ElasticityProfile]) -> Result<ViolinSummary, ViolinError> {
    let mut regions = Vec::new();
    for region in Region::ALL {
        let in_region: Vec<&ElasticityProfile> = profiles.iter().filter(|p| p.region == region).collect();
        if in_region.is_empty() {
            continue;
        }
        let sample: Vec<f64> = in_region.iter().filter_map(|p| p.mean_elasticity).collect();
        if sample.len() < 2 {
            return Err(ViolinError::InsufficientSample { region, got: sample.len() });
        }
        let stats = describe(&sample).map_err(|source| ViolinError::Stats { region, source })?;
        let density = kde(&sample, VIOLIN_GRID).map_err(|source| ViolinError::Stats { region, source })?;
        regions.push(RegionViolin {
            region,
            e_min: stats.min,
            e_max: stats.max,
            stats,
            density,
        });
    }
    Ok(ViolinSummary { regions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(id: usize, region: Region, e: Option<f64>) -> ElasticityProfile {
        ElasticityProfile {
            journal_id: format!("J{id}"),
            region,
            pairs: Vec::new(),
            mean_elasticity: e,
            defined_count: 1,
            undefined_count: 0,
            mean_pub: 10.0,
            mean_jif: 1.0,
        }
    }

    fn cohort(region: Region, values: &[f64]) -> Vec<ElasticityProfile> {
        values.iter().enumerate().map(|(i, &e)| profile(i, region, Some(e))).collect()
    }

    #[test]
    fn published_cohort_extremes() {
        let mut ps = cohort(Region::Overseas, &[-28.621, -3.2, -0.4, 0.2, 0.9, 1.7, 5.5, 19.421]);
        ps.extend(cohort(Region::China, &[-4.054, -1.1, 0.3, 0.6, 2.4, 11.882]));
        let v = violin_summary(&ps).unwrap();
        let china = &v.regions[0];
        let overseas = &v.regions[1];
        assert_eq!((china.e_min, china.e_max), (-4.054, 11.882));
        assert_eq!((overseas.e_min, overseas.e_max), (-28.621, 19.421));
        for r in &v.regions {
            assert!(r.e_min <= r.stats.median && r.stats.median <= r.e_max);
        }
    }

    #[test]
    fn two_element_median_is_mean() {
        let v = violin_summary(&cohort(Region::China, &[-2.0, 3.0])).unwrap();
        assert_eq!(v.regions[0].stats.median, 0.5);
    }

    #[test]
    fn insufficient_sample() {
        let mut ps = cohort(Region::China, &[1.0]);
        ps.push(profile(9, Region::China, None));
        assert_eq!(
            violin_summary(&ps),
            Err(ViolinError::InsufficientSample { region: Region::China, got: 1 })
        );
    }
}
