//! Price-elasticity analysis of journal demand for open-access publishing.
//!
//! A journal's impact factor is treated as its price and its yearly output
//! as quantity. The crate ingests per-journal series, computes arc
//! elasticities, fits linear demand, locates the revenue-maximising
//! optimum, aggregates portfolios by region, and renders tables and SVG.

pub mod cli;
pub mod elasticity;
pub mod ingest;
pub mod portfolio;
pub mod report;
pub mod stats;
