//! Subcommand bodies. Each returns the exit code on success paths that
//! still signal a verdict (`validate`), or a `CliError`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use super::{CliError, RunConfig, EXIT_DATA, EXIT_IO, EXIT_MODEL, EXIT_NOT_FOUND, EXIT_OK};
use crate::elasticity::{elasticity_profile, fit_demand, ElasticityError, ElasticityProfile};
use crate::ingest::{
    filter_eligible, parse_national_stats, parse_portfolio, validate_portfolio, IngestError, InputFormat, Portfolio,
    Region,
};
use crate::portfolio::{
    category_summary, classify, optimization_aggregate, screen_correlations, share_table, Category,
    CorrelationScreen, PortfolioError, ScreenOutcome,
};
use crate::report::{
    emit_svg, negative_elasticity_bars, positive_elasticity_bars, render_table, sample_curves, violin_summary,
    BarChart, Cell, Chart, CurveError, Marks, TableDoc, TableFormat, ViolinSummary, DEMAND_LABEL, MR_LABEL,
};

pub const UNDEFINED_NOTE: &str = "ē undefined";

pub const SHARES_FOOTNOTE: &str = "domestic_oa_intensity = SCI_OA-J / SCI_J. The InCites summary heads this \
column SCI_OA-J / SCI_China, but its printed percentages equal SCI_OA-J / SCI_J.";

fn ingest_error(path: &Path, err: IngestError) -> CliError {
    match err {
        IngestError::Io(e) => CliError::io(path, &e),
        other => CliError::new(EXIT_DATA, format!("{}: {other}", path.display())),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, &e))
}

fn load_portfolio(path: &Path) -> Result<Portfolio, CliError> {
    let mut portfolio = parse_portfolio(open(path)?, InputFormat::from_path(path)).map_err(|e| ingest_error(path, e))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        portfolio.set_name(stem);
    }
    Ok(portfolio)
}

fn table_err(e: crate::report::TableError) -> CliError {
    CliError::new(EXIT_DATA, e.to_string())
}

/// File-name-safe form of a journal id.
fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Tables and charts produced by one command, in output order.
#[derive(Default)]
struct Bundle {
    tables: Vec<(String, TableDoc)>,
    charts: Vec<(String, String)>,
}

impl Bundle {
    fn table(&mut self, stem: impl Into<String>, doc: TableDoc) {
        self.tables.push((stem.into(), doc));
    }

    fn chart(&mut self, stem: impl Into<String>, svg: String) {
        self.charts.push((stem.into(), svg));
    }

    fn emit(&self, config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
        match &config.out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, &e))?;
                let mut written = Vec::new();
                for &format in &config.formats {
                    for (stem, doc) in &self.tables {
                        let path = dir.join(format!("{stem}.{}", format.extension()));
                        std::fs::write(&path, render_table(doc, format)).map_err(|e| CliError::io(&path, &e))?;
                        written.push(path);
                    }
                }
                if config.svg {
                    for (stem, svg) in &self.charts {
                        let path = dir.join(format!("{stem}.svg"));
                        std::fs::write(&path, svg).map_err(|e| CliError::io(&path, &e))?;
                        written.push(path);
                    }
                }
                for path in written {
                    let _ = writeln!(stderr, "wrote {}", path.display());
                }
            }
            None => {
                let text = self.render_stdout(&config.formats);
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::new(EXIT_IO, format!("standard output: {e}")))?;
            }
        }
        Ok(())
    }

    fn render_stdout(&self, formats: &[TableFormat]) -> String {
        let mut sections = Vec::new();
        for &format in formats {
            let text = match format {
                TableFormat::Json if self.tables.len() == 1 => render_table(&self.tables[0].1, format),
                TableFormat::Json => {
                    let all: Vec<_> = self.tables.iter().map(|(_, d)| d.to_json_value()).collect();
                    let mut s = serde_json::to_string_pretty(&all).expect("tables serialize");
                    s.push('\n');
                    s
                }
                TableFormat::Csv if self.tables.len() == 1 => render_table(&self.tables[0].1, format),
                TableFormat::Csv => self
                    .tables
                    .iter()
                    .map(|(_, d)| format!("# {}\r\n{}", d.title, render_table(d, format)))
                    .collect::<Vec<_>>()
                    .join("\r\n"),
                TableFormat::Markdown => self
                    .tables
                    .iter()
                    .map(|(_, d)| render_table(d, format))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            sections.push(text);
        }
        sections.join("\n")
    }
}

pub fn validate(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let path = config.require_input()?;
    let validation =
        validate_portfolio(open(path)?, InputFormat::from_path(path)).map_err(|e| ingest_error(path, e))?;
    for violation in &validation.violations {
        let _ = writeln!(stderr, "{}: {violation}", path.display());
    }
    let portfolio = &validation.portfolio;
    let eligibility = filter_eligible(&portfolio.windowed(None, Some(config.latest_year)), config.min_pairs);
    let mut out = String::new();
    out.push_str(&format!("journals: {}\n", portfolio.len()));
    out.push_str(&format!("observations: {}\n", portfolio.observation_count()));
    out.push_str(&format!("{} violations\n", validation.violations.len()));
    out.push_str(&format!(
        "eligible (min_pairs = {}, through {}): {}\n",
        config.min_pairs,
        config.latest_year,
        eligibility.eligible.len()
    ));
    out.push_str(&format!("excluded: insufficient data pairs: {}\n", eligibility.excluded.len()));
    for id in &eligibility.excluded {
        out.push_str(&format!("  {id}\n"));
    }
    stdout
        .write_all(out.as_bytes())
        .map_err(|e| CliError::new(EXIT_IO, format!("standard output: {e}")))?;
    Ok(if validation.is_clean() { EXIT_OK } else { EXIT_DATA })
}

fn model_error(id: &str, err: ElasticityError) -> CliError {
    CliError::new(EXIT_MODEL, format!("journal {id}: {err}"))
}

/// Profiles of `portfolio` ordered by (region, journal id).
fn profiles_of(portfolio: &Portfolio, config: &RunConfig) -> Result<Vec<ElasticityProfile>, CliError> {
    let mut profiles = portfolio
        .journals()
        .iter()
        .map(|j| elasticity_profile(j, config.gap_policy).map_err(|e| model_error(j.id(), e)))
        .collect::<Result<Vec<_>, _>>()?;
    profiles.sort_by(|a, b| (a.region, &a.journal_id).cmp(&(b.region, &b.journal_id)));
    Ok(profiles)
}

fn profile_table(
    portfolio: &Portfolio,
    profiles: &[ElasticityProfile],
    screens: &BTreeMap<&str, &CorrelationScreen>,
    alpha: f64,
) -> Result<TableDoc, CliError> {
    let mut doc = TableDoc::new(
        "Per-journal elasticity profiles",
        [
            "journal_id",
            "region",
            "n_obs",
            "pairs",
            "undefined_pairs",
            "e_bar",
            "mean_pub",
            "mean_jif",
            "rho",
            "p_value",
            "significant",
            "category",
            "jif_opt",
            "pub_opt",
            "markup",
            "note",
        ],
    )
    .with_footnote(format!("significant: Spearman p < {alpha} between JIF and PUB"));
    for p in profiles {
        let n_obs = portfolio.get(&p.journal_id).map_or(0, |j| j.len());
        let mut notes = Vec::new();
        let (rho, p_value, significant) = match screens.get(p.journal_id.as_str()).map(|s| &s.outcome) {
            Some(ScreenOutcome::Tested { rho, p_value, significant }) => {
                (Cell::real_with(*rho, 4), Cell::real_with(*p_value, 6), Cell::Bool(*significant))
            }
            Some(ScreenOutcome::Untestable { reason }) => {
                notes.push(format!("correlation untestable: {reason}"));
                (Cell::Missing, Cell::Missing, Cell::Missing)
            }
            None => (Cell::Missing, Cell::Missing, Cell::Missing),
        };
        let category = match p.mean_elasticity {
            Some(e) => classify(e).map_or(Cell::Missing, |c| Cell::text(c.label())),
            None => {
                notes.insert(0, UNDEFINED_NOTE.to_string());
                Cell::Missing
            }
        };
        let optimum = match fit_demand(p) {
            Ok(model) => model.optimum(),
            Err(ElasticityError::ZeroElasticity) => {
                notes.insert(0, "ē = 0: no demand line".to_string());
                None
            }
            Err(_) => None,
        };
        doc.push_row(vec![
            Cell::text(&p.journal_id),
            Cell::text(p.region.as_str()),
            Cell::Integer(n_obs as i64),
            Cell::Integer(p.pairs.len() as i64),
            Cell::Integer(p.undefined_count as i64),
            p.mean_elasticity.map_or(Cell::Missing, |e| Cell::real_with(e, 4)),
            Cell::real(p.mean_pub),
            Cell::real(p.mean_jif),
            rho,
            p_value,
            significant,
            category,
            optimum.map_or(Cell::Missing, |o| Cell::real_with(o.jif_opt, 4)),
            optimum.map_or(Cell::Missing, |o| Cell::real_with(o.pub_opt, 1)),
            optimum.map_or(Cell::Missing, |o| Cell::real_with(o.markup, 4)),
            Cell::text(notes.join("; ")),
        ])
        .map_err(table_err)?;
    }
    Ok(doc)
}

fn category_table(profiles: &[ElasticityProfile]) -> Result<TableDoc, CliError> {
    let summary = category_summary(profiles);
    let mut doc = TableDoc::new(
        "Journals by elasticity category",
        ["region", "category", "journal_count", "sum_mean_pub", "avg_mean_pub"],
    );
    for region in Region::ALL {
        for category in Category::ALL {
            let cell = summary.cell(region, category);
            doc.push_row(vec![
                Cell::text(region.as_str()),
                Cell::text(category.label()),
                Cell::Integer(cell.journal_count as i64),
                Cell::real_with(cell.sum_mean_pub, 1),
                cell.avg_mean_pub_per_journal.map_or(Cell::Missing, |v| Cell::real_with(v, 1)),
            ])
            .map_err(table_err)?;
        }
    }
    if !summary.unclassifiable.is_empty() {
        doc = doc.with_footnote(format!(
            "not classified ({UNDEFINED_NOTE}): {}",
            summary.unclassifiable.join(", ")
        ));
    }
    Ok(doc)
}

fn optimization_table(
    portfolio: &Portfolio,
    profiles: &[ElasticityProfile],
    latest_year: i32,
    stderr: &mut dyn Write,
) -> Result<TableDoc, CliError> {
    let mut doc = TableDoc::new(
        format!("Current and optimal output for journals with e < 0 (latest year {latest_year})"),
        [
            "region",
            "negative_count",
            "count_e_le_-1",
            "share_e_le_-1",
            "sum_mean_pub",
            "sum_latest_pub",
            "sum_pub_opt",
            "mean_pub_over_opt",
            "latest_pub_over_opt",
            "sum_mean_jif",
            "sum_latest_jif",
            "sum_jif_opt",
            "mean_jif_over_opt",
            "latest_jif_over_opt",
        ],
    );
    match optimization_aggregate(portfolio, profiles, latest_year) {
        Ok(agg) => {
            for r in &agg.regions {
                doc.push_row(vec![
                    Cell::text(r.region.as_str()),
                    Cell::Integer(r.negative_count as i64),
                    Cell::Integer(r.count_elastic as i64),
                    Cell::Percent(r.share_elastic),
                    Cell::real_with(r.sum_mean_pub, 1),
                    Cell::real_with(r.sum_latest_pub, 1),
                    Cell::real_with(r.sum_pub_opt, 1),
                    Cell::Percent(r.mean_pub_over_opt),
                    Cell::Percent(r.latest_pub_over_opt),
                    Cell::real(r.sum_mean_jif),
                    Cell::real(r.sum_latest_jif),
                    Cell::real(r.sum_jif_opt),
                    Cell::Percent(r.mean_jif_over_opt),
                    Cell::Percent(r.latest_jif_over_opt),
                ])
                .map_err(table_err)?;
            }
            let missing: Vec<&str> = agg.missing_latest().collect();
            if !missing.is_empty() {
                let note = format!("no {latest_year} observation, left out of latest sums: {}", missing.join(", "));
                let _ = writeln!(stderr, "warning: {note}");
                doc = doc.with_footnote(note);
            }
        }
        Err(err @ PortfolioError::NoNegativeElasticity) => {
            let _ = writeln!(stderr, "warning: {err}");
            doc = doc.with_footnote(err.to_string());
        }
        Err(err) => return Err(CliError::new(EXIT_DATA, err.to_string())),
    }
    Ok(doc)
}

fn distribution_tables(summary: Option<&ViolinSummary>, note: Option<&str>) -> Result<(TableDoc, TableDoc), CliError> {
    let mut stats = TableDoc::new(
        "Distribution of averaged elasticity by region",
        ["region", "n", "min", "q1", "median", "q3", "max", "lower_fence", "upper_fence", "mean", "bandwidth"],
    );
    let mut density = TableDoc::new("Kernel density of averaged elasticity", ["region", "e", "density"]);
    if let Some(summary) = summary {
        for r in &summary.regions {
            let s = &r.stats;
            stats
                .push_row(vec![
                    Cell::text(r.region.as_str()),
                    Cell::Integer(s.n as i64),
                    Cell::real(s.min),
                    Cell::real(s.q1),
                    Cell::real(s.median),
                    Cell::real(s.q3),
                    Cell::real(s.max),
                    Cell::real(s.lower_fence),
                    Cell::real(s.upper_fence),
                    Cell::real(s.mean),
                    Cell::real_with(r.density.bandwidth, 4),
                ])
                .map_err(table_err)?;
            for (&g, &d) in r.density.grid.iter().zip(&r.density.density) {
                density
                    .push_row(vec![Cell::text(r.region.as_str()), Cell::real_with(g, 4), Cell::real_with(d, 6)])
                    .map_err(table_err)?;
            }
        }
    }
    if let Some(note) = note {
        stats = stats.with_footnote(note);
        density = density.with_footnote(note);
    }
    Ok((stats, density))
}

fn bar_table(title: &str, charts: &[BarChart], with_opt: bool, threshold: f64) -> Result<TableDoc, CliError> {
    let mut headers = vec!["region", "journal_id", "e_bar", "mean_pub"];
    if with_opt {
        headers.push("pub_opt");
    }
    headers.push("side");
    let mut doc = TableDoc::new(title, headers);
    for chart in charts {
        let region = chart.title.split(':').next().unwrap_or_default();
        for g in &chart.groups {
            let mut row = vec![
                Cell::text(region),
                Cell::text(&g.label),
                Cell::real_with(g.elasticity, 4),
                Cell::real(g.values[0]),
            ];
            if with_opt {
                row.push(Cell::real_with(g.values[1], 1));
            }
            let side = match (with_opt, g.elasticity <= threshold, g.elasticity < threshold) {
                (true, true, _) => "e <= -1",
                (true, false, _) => "-1 < e < 0",
                (false, _, true) => "0 < e < 1",
                (false, _, false) => "e >= 1",
            };
            row.push(Cell::text(side));
            doc.push_row(row).map_err(table_err)?;
        }
    }
    Ok(doc)
}

pub fn analyze(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let path = config.require_input()?;
    let portfolio = load_portfolio(path)?.windowed(None, Some(config.latest_year));
    let eligibility = filter_eligible(&portfolio, config.min_pairs);
    if !eligibility.excluded.is_empty() {
        let _ = writeln!(
            stderr,
            "excluded: insufficient data pairs (< {}): {}",
            config.min_pairs,
            eligibility.excluded.join(", ")
        );
    }
    let eligible = eligibility.eligible;
    if eligible.is_empty() {
        return Err(CliError::new(EXIT_DATA, "no eligible journals"));
    }
    let profiles = profiles_of(&eligible, config)?;
    let screened = screen_correlations(&eligible, config.alpha);
    let screens: BTreeMap<&str, &CorrelationScreen> = screened.iter().map(|s| (s.journal_id.as_str(), s)).collect();

    let mut bundle = Bundle::default();
    bundle.table("profiles", profile_table(&eligible, &profiles, &screens, config.alpha)?);
    bundle.table("categories", category_table(&profiles)?);
    bundle.table("optimization", optimization_table(&eligible, &profiles, config.latest_year, stderr)?);

    let violin = violin_summary(&profiles);
    let (stats, density) = match &violin {
        Ok(summary) => distribution_tables(Some(summary), None)?,
        Err(err) => {
            let note = format!("distribution skipped: {err}");
            let _ = writeln!(stderr, "warning: {note}");
            distribution_tables(None, Some(&note))?
        }
    };
    bundle.table("elasticity_distribution", stats);
    bundle.table("elasticity_density", density);

    let regions: Vec<Region> = Region::ALL
        .into_iter()
        .filter(|r| profiles.iter().any(|p| p.region == *r))
        .collect();
    let negative: Vec<BarChart> = regions.iter().map(|&r| negative_elasticity_bars(&profiles, r)).collect();
    let positive: Vec<BarChart> = regions.iter().map(|&r| positive_elasticity_bars(&profiles, r)).collect();
    bundle.table("negative_bars", bar_table("Mean and optimal PUB for journals with e < 0", &negative, true, -1.0)?);
    bundle.table("positive_bars", bar_table("Mean PUB for journals with e > 0", &positive, false, 1.0)?);

    if let Ok(summary) = &violin {
        bundle.chart("fig2_elasticity_violin", emit_svg(&Chart::Violin(summary)));
    }
    for (region, chart) in regions.iter().zip(&negative) {
        bundle.chart(format!("fig3_negative_{}", region.as_str().to_lowercase()), emit_svg(&Chart::Bars(chart)));
    }
    for (region, chart) in regions.iter().zip(&positive) {
        bundle.chart(format!("fig4_positive_{}", region.as_str().to_lowercase()), emit_svg(&Chart::Bars(chart)));
    }
    bundle.emit(config, stdout, stderr)?;
    Ok(EXIT_OK)
}

pub fn curves(
    config: &RunConfig,
    journal: &str,
    pub_max: Option<f64>,
    n_points: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let path = config.require_input()?;
    let portfolio = load_portfolio(path)?.windowed(None, Some(config.latest_year));
    let series = portfolio
        .get(journal)
        .ok_or_else(|| CliError::new(EXIT_NOT_FOUND, format!("journal not found: {journal}")))?;
    let profile = elasticity_profile(series, config.gap_policy).map_err(|e| model_error(journal, e))?;
    let Some(e) = profile.mean_elasticity else {
        return Err(CliError::new(
            EXIT_MODEL,
            format!("journal {journal}: {UNDEFINED_NOTE}, JIF does not change across any year pair, so no demand line can be fitted"),
        ));
    };
    let model = fit_demand(&profile).map_err(|err| model_error(journal, err))?;
    let optimum = model.optimum();
    let pub_max = pub_max.unwrap_or_else(|| 2.0 * optimum.map_or(model.mean_pub(), |o| o.pub_opt));
    let marks = if optimum.is_some() { Marks::WithOptimum } else { Marks::MeanOnly };
    let title = format!("{journal}: demand and marginal revenue");
    let set = sample_curves(&model, &title, pub_max, n_points, marks).map_err(|err| match err {
        CurveError::NoOptimum(_) => CliError::new(EXIT_MODEL, format!("journal {journal}: {err}")),
        other => CliError::usage(format!("journal {journal}: {other}")),
    })?;

    let mut doc = TableDoc::new(title, ["pub", "demand_jif", "marginal_revenue"])
        .with_footnote(format!("e_bar = {e:.4}, slope = {:.6}, intercept = {:.6}", model.slope(), model.intercept()));
    if let Some(o) = optimum {
        doc = doc.with_footnote(format!("jif_opt = {:.4}, pub_opt = {:.1}, markup = {:.4}", o.jif_opt, o.pub_opt, o.markup));
    }
    let demand = set.curve(DEMAND_LABEL).expect("demand curve");
    let mr = set.curve(MR_LABEL).expect("mr curve");
    for (&(x, jif), &(_, m)) in demand.points.iter().zip(&mr.points) {
        doc.push_row(vec![Cell::real(x), Cell::real_with(jif, 6), Cell::real_with(m, 6)])
            .map_err(table_err)?;
    }
    let stem = format!("curves_{}", file_stem(journal));
    let mut bundle = Bundle::default();
    bundle.chart(stem.clone(), emit_svg(&Chart::Curves(&set)));
    bundle.table(stem, doc);
    bundle.emit(config, stdout, stderr)?;
    Ok(EXIT_OK)
}

pub fn shares(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let path = config.require_national()?;
    let stats = parse_national_stats(open(path)?).map_err(|e| ingest_error(path, e))?;
    let rows = share_table(&stats).map_err(|e| CliError::new(EXIT_DATA, format!("{}: {e}", path.display())))?;
    let mut doc = TableDoc::new(
        "Open-access share ratios by year",
        ["year", "oa_share", "domestic_capture", "domestic_oa_intensity"],
    )
    .with_footnote("oa_share = SCI_OA / SCI_China; domestic_capture = SCI_OA-J / SCI_OA")
    .with_footnote(SHARES_FOOTNOTE);
    for r in &rows {
        doc.push_row(vec![
            Cell::Integer(r.year as i64),
            Cell::Percent(r.oa_share),
            Cell::Percent(r.domestic_capture),
            Cell::Percent(r.domestic_oa_intensity),
        ])
        .map_err(table_err)?;
    }
    let mut bundle = Bundle::default();
    bundle.table("shares", doc);
    bundle.emit(config, stdout, stderr)?;
    Ok(EXIT_OK)
}
