//! Portfolio-level analyses over per-journal elasticity profiles.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::elasticity::{fit_demand, ElasticityProfile};
use crate::ingest::{NationalYearStats, Portfolio, Region};
use crate::stats::{spearman, StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PortfolioError {
    #[error("elasticity {0} cannot be classified")]
    Unclassifiable(f64),
    #[error("no journal has a negative averaged elasticity")]
    NoNegativeElasticity,
    #[error("year {year}: {column} is zero")]
    ZeroDenominator { year: i32, column: &'static str },
}

/// Elasticity regime of a journal. Bins are closed at −1 on the left,
/// at 0 in the second, and at 1 in the top bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Category {
    /// ē ≤ −1
    StrongElastic,
    /// −1 < ē ≤ 0
    InelasticNegative,
    /// 0 < ē < 1
    DiminishingReturns,
    /// ē ≥ 1
    IncreasingReturns,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::StrongElastic,
        Category::InelasticNegative,
        Category::DiminishingReturns,
        Category::IncreasingReturns,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::StrongElastic => "e <= -1",
            Category::InelasticNegative => "-1 < e <= 0",
            Category::DiminishingReturns => "0 < e < 1",
            Category::IncreasingReturns => "e >= 1",
        }
    }

    pub fn contains(self, e: f64) -> bool {
        match self {
            Category::StrongElastic => e <= -1.0,
            Category::InelasticNegative => -1.0 < e && e <= 0.0,
            Category::DiminishingReturns => 0.0 < e && e < 1.0,
            Category::IncreasingReturns => e >= 1.0,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Category::StrongElastic => "StrongElastic",
            Category::InelasticNegative => "InelasticNegative",
            Category::DiminishingReturns => "DiminishingReturns",
            Category::IncreasingReturns => "IncreasingReturns",
        };
        f.write_str(name)
    }
}

pub fn classify(e_bar: f64) -> Result<Category, PortfolioError> {
    if e_bar.is_nan() {
        return Err(PortfolioError::Unclassifiable(e_bar));
    }
    Ok(if e_bar <= -1.0 {
        Category::StrongElastic
    } else if e_bar <= 0.0 {
        Category::InelasticNegative
    } else if e_bar < 1.0 {
        Category::DiminishingReturns
    } else {
        Category::IncreasingReturns
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryCell {
    pub region: Region,
    pub category: Category,
    pub journal_count: usize,
    pub sum_mean_pub: f64,
    /// Absent for an empty cell.
    pub avg_mean_pub_per_journal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySummary {
    /// One cell per (region, category), regions then categories in order.
    pub cells: Vec<CategoryCell>,
    /// Journals whose ē is undefined.
    pub unclassifiable: Vec<String>,
}

impl CategorySummary {
    pub fn cell(&self, region: Region, category: Category) -> &CategoryCell {
        self.cells
            .iter()
            .find(|c| c.region == region && c.category == category)
            .expect("every region/category cell is present")
    }

    /// Journal counts per category, both regions pooled.
    pub fn counts(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for c in &self.cells {
            out[c.category as usize] += c.journal_count;
        }
        out
    }

    pub fn region_total(&self, region: Region) -> usize {
        self.cells.iter().filter(|c| c.region == region).map(|c| c.journal_count).sum()
    }
}

/// Journal counts and averaged PUB̄ per journal by region and category.
pub fn category_summary(profiles: &[ElasticityProfile]) -> CategorySummary {
    let mut cells: Vec<CategoryCell> = Region::ALL
        .iter()
        .flat_map(|&region| {
            Category::ALL.iter().map(move |&category| CategoryCell {
                region,
                category,
                journal_count: 0,
                sum_mean_pub: 0.0,
                avg_mean_pub_per_journal: None,
            })
        })
        .collect();
    let mut unclassifiable = Vec::new();
    for p in profiles {
        match p.mean_elasticity.map(classify) {
            Some(Ok(category)) => {
                let idx = p.region as usize * Category::ALL.len() + category as usize;
                cells[idx].journal_count += 1;
                cells[idx].sum_mean_pub += p.mean_pub;
            }
            _ => unclassifiable.push(p.journal_id.clone()),
        }
    }
    for c in &mut cells {
        if c.journal_count > 0 {
            c.avg_mean_pub_per_journal = Some(c.sum_mean_pub / c.journal_count as f64);
        }
    }
    unclassifiable.sort();
    CategorySummary { cells, unclassifiable }
}

/// Aggregate optimum comparison for one region's negative-ē journals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionOptimization {
    pub region: Region,
    pub negative_count: usize,
    /// Journals with ē ≤ −1 (the optimum lies above their PUB̄).
    pub count_elastic: usize,
    pub share_elastic: f64,
    pub sum_mean_pub: f64,
    pub sum_latest_pub: f64,
    pub sum_pub_opt: f64,
    pub sum_mean_jif: f64,
    pub sum_latest_jif: f64,
    pub sum_jif_opt: f64,
    pub mean_pub_over_opt: f64,
    pub latest_pub_over_opt: f64,
    pub mean_jif_over_opt: f64,
    pub latest_jif_over_opt: f64,
    /// Journals counted here that lack a latest-year observation.
    pub missing_latest: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationAggregate {
    pub latest_year: i32,
    /// Regions with at least one negative-ē journal, in region order.
    pub regions: Vec<RegionOptimization>,
}

impl OptimizationAggregate {
    pub fn region(&self, region: Region) -> Option<&RegionOptimization> {
        self.regions.iter().find(|r| r.region == region)
    }

    pub fn missing_latest(&self) -> impl Iterator<Item = &str> {
        self.regions.iter().flat_map(|r| r.missing_latest.iter().map(String::as_str))
    }
}

/// Sums of PUB̄, latest PUB, PUB_opt (and the JIF counterparts) over
/// journals with ē < 0, per region.
///
/// A journal without an observation in `latest_year` still contributes
/// its mean and optimum but is left out of the latest-year sums and
/// listed in `missing_latest`. Profiles whose journal is absent from the
/// portfolio are treated the same way.
pub fn optimization_aggregate(
    portfolio: &Portfolio,
    profiles: &[ElasticityProfile],
    latest_year: i32,
) -> Result<OptimizationAggregate, PortfolioError> {
    let mut regions = Vec::new();
    for region in Region::ALL {
        let mut agg = RegionOptimization {
            region,
            negative_count: 0,
            count_elastic: 0,
            share_elastic: 0.0,
            sum_mean_pub: 0.0,
            sum_latest_pub: 0.0,
            sum_pub_opt: 0.0,
            sum_mean_jif: 0.0,
            sum_latest_jif: 0.0,
            sum_jif_opt: 0.0,
            mean_pub_over_opt: 0.0,
            latest_pub_over_opt: 0.0,
            mean_jif_over_opt: 0.0,
            latest_jif_over_opt: 0.0,
            missing_latest: Vec::new(),
        };
        let mut members: Vec<&ElasticityProfile> = profiles
            .iter()
            .filter(|p| p.region == region && p.mean_elasticity.is_some_and(|e| e < 0.0))
            .collect();
        members.sort_by(|a, b| a.journal_id.cmp(&b.journal_id));
        for p in members {
            let Ok(model) = fit_demand(p) else { continue };
            let Some(opt) = model.optimum() else { continue };
            agg.negative_count += 1;
            if model.elasticity() <= -1.0 {
                agg.count_elastic += 1;
            }
            agg.sum_mean_pub += p.mean_pub;
            agg.sum_mean_jif += p.mean_jif;
            agg.sum_pub_opt += opt.pub_opt;
            agg.sum_jif_opt += opt.jif_opt;
            match portfolio.get(&p.journal_id).and_then(|j| j.observation_in(latest_year)) {
                Some(obs) => {
                    agg.sum_latest_pub += obs.pub_f64();
                    agg.sum_latest_jif += obs.jif;
                }
                None => agg.missing_latest.push(p.journal_id.clone()),
            }
        }
        if agg.negative_count == 0 {
            continue;
        }
        agg.share_elastic = agg.count_elastic as f64 / agg.negative_count as f64;
        agg.mean_pub_over_opt = agg.sum_mean_pub / agg.sum_pub_opt;
        agg.latest_pub_over_opt = agg.sum_latest_pub / agg.sum_pub_opt;
        agg.mean_jif_over_opt = agg.sum_mean_jif / agg.sum_jif_opt;
        agg.latest_jif_over_opt = agg.sum_latest_jif / agg.sum_jif_opt;
        regions.push(agg);
    }
    if regions.is_empty() {
        return Err(PortfolioError::NoNegativeElasticity);
    }
    Ok(OptimizationAggregate { latest_year, regions })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScreenOutcome {
    Tested { rho: f64, p_value: f64, significant: bool },
    Untestable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationScreen {
    pub journal_id: String,
    pub region: Region,
    pub n: usize,
    pub outcome: ScreenOutcome,
}

impl CorrelationScreen {
    pub fn significant(&self) -> Option<bool> {
        match self.outcome {
            ScreenOutcome::Tested { significant, .. } => Some(significant),
            ScreenOutcome::Untestable { .. } => None,
        }
    }
}

/// Spearman correlation between each journal's JIF and PUB series;
/// significant when `p < alpha`.
pub fn screen_correlations(portfolio: &Portfolio, alpha: f64) -> Vec<CorrelationScreen> {
    let mut out: Vec<CorrelationScreen> = portfolio
        .journals()
        .iter()
        .map(|j| {
            let jif: Vec<f64> = j.observations().iter().map(|o| o.jif).collect();
            let pubs: Vec<f64> = j.observations().iter().map(|o| o.pub_f64()).collect();
            let outcome = match spearman(&jif, &pubs) {
                Ok(r) => ScreenOutcome::Tested {
                    rho: r.rho,
                    p_value: r.p_value,
                    significant: r.p_value < alpha,
                },
                Err(StatsError::ConstantInput) => ScreenOutcome::Untestable {
                    reason: "constant JIF or PUB series".to_string(),
                },
                Err(e) => ScreenOutcome::Untestable { reason: e.to_string() },
            };
            CorrelationScreen {
                journal_id: j.id().to_string(),
                region: j.region(),
                n: j.len(),
                outcome,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.region, &a.journal_id).cmp(&(b.region, &b.journal_id)));
    out
}

/// National open-access share ratios for one year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShareRow {
    pub year: i32,
    /// sci_oa / sci_total
    pub oa_share: f64,
    /// oa_in_domestic / sci_oa
    pub domestic_capture: f64,
    /// oa_in_domestic / total_in_domestic
    pub domestic_oa_intensity: f64,
}

pub fn share_table(stats: &[NationalYearStats]) -> Result<Vec<ShareRow>, PortfolioError> {
    stats
        .iter()
        .map(|s| {
            let ratio = |num: u64, den: u64, column: &'static str| {
                if den == 0 {
                    Err(PortfolioError::ZeroDenominator { year: s.year, column })
                } else {
                    Ok(num as f64 / den as f64)
                }
            };
            Ok(ShareRow {
                year: s.year,
                oa_share: ratio(s.sci_oa, s.sci_total, "sci_total")?,
                domestic_capture: ratio(s.oa_in_domestic, s.sci_oa, "sci_oa")?,
                domestic_oa_intensity: ratio(s.oa_in_domestic, s.total_in_domestic, "total_in_domestic")?,
            })
        })
        .collect()
}
