//! Journal time-series and national aggregate ingestion.
//!
//! Two portfolio encodings are accepted:
//!
//! * CSV with the header `journal_id,region,year,jif,pub`, one row per
//!   journal-year observation;
//! * JSON, an array of `{id, region, observations: [{year, jif, pub}]}`.
//!
//! National statistics come as CSV with the header
//! `year,sci_oa,sci_total,oa_in_domestic,total_in_domestic`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PORTFOLIO_HEADER: [&str; 5] = ["journal_id", "region", "year", "jif", "pub"];
pub const NATIONAL_HEADER: [&str; 5] = [
    "year",
    "sci_oa",
    "sci_total",
    "oa_in_domestic",
    "total_in_domestic",
];

pub const MIN_YEAR: i32 = 1900;
pub const MAX_YEAR: i32 = 2100;

/// Where in the source a problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line in a CSV stream.
    Line(u64),
    /// 0-based index into a JSON array (series, then observation).
    Record { series: usize, observation: Option<usize> },
    /// Not tied to a single row.
    Whole,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Line(line) => write!(f, "line {line}"),
            Location::Record {
                series,
                observation: Some(obs),
            } => write!(f, "series {series}, observation {obs}"),
            Location::Record {
                series,
                observation: None,
            } => write!(f, "series {series}"),
            Location::Whole => f.write_str("input"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{at}: malformed row: {message}")]
    Malformed { at: Location, message: String },
    #[error("{at}: header mismatch: expected `{expected}`, found `{found}`")]
    Header {
        at: Location,
        expected: String,
        found: String,
    },
    #[error("{at}: non-positive jif {value}")]
    NonPositiveJif { at: Location, value: f64 },
    #[error("{at}: non-positive pub {value}")]
    NonPositivePub { at: Location, value: f64 },
    #[error("{at}: fractional pub {value} (pub must be an integer)")]
    FractionalPub { at: Location, value: f64 },
    #[error("{at}: year {year} outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange { at: Location, year: i64 },
    #[error("{at}: unknown region tag `{tag}`")]
    UnknownRegion { at: Location, tag: String },
    #[error("{at}: duplicate observation for journal {journal} in {year}")]
    DuplicateObservation {
        at: Location,
        journal: String,
        year: i32,
    },
    #[error("{at}: duplicate journal id {journal}")]
    DuplicateJournal { at: Location, journal: String },
    #[error("journal {journal} has no observations")]
    EmptySeries { journal: String },
    #[error("journal {journal}: observation years must be strictly increasing")]
    UnorderedYears { journal: String },
    #[error("{at}: duplicate year {year}")]
    DuplicateYear { at: Location, year: i32 },
    #[error("{at}: year {year}: {message}")]
    CountInvariant {
        at: Location,
        year: i32,
        message: String,
    },
    #[error("{at}: {message}")]
    Json { at: Location, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IngestError {
    pub fn location(&self) -> Option<Location> {
        match self {
            IngestError::Malformed { at, .. }
            | IngestError::Header { at, .. }
            | IngestError::NonPositiveJif { at, .. }
            | IngestError::NonPositivePub { at, .. }
            | IngestError::FractionalPub { at, .. }
            | IngestError::YearOutOfRange { at, .. }
            | IngestError::UnknownRegion { at, .. }
            | IngestError::DuplicateObservation { at, .. }
            | IngestError::DuplicateJournal { at, .. }
            | IngestError::DuplicateYear { at, .. }
            | IngestError::CountInvariant { at, .. }
            | IngestError::Json { at, .. } => Some(*at),
            IngestError::EmptySeries { .. }
            | IngestError::UnorderedYears { .. }
            | IngestError::Io(_) => None,
        }
    }
}

/// The two journal cohorts compared throughout the analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    China,
    Overseas,
}

impl Region {
    pub const ALL: [Region; 2] = [Region::China, Region::Overseas];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::China => "China",
            Region::Overseas => "Overseas",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tag = s.trim();
        if tag.eq_ignore_ascii_case("china") {
            Ok(Region::China)
        } else if tag.eq_ignore_ascii_case("overseas") {
            Ok(Region::Overseas)
        } else {
            Err(tag.to_string())
        }
    }
}

/// One year of a journal: its impact factor and publication count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JournalObservation {
    pub year: i32,
    pub jif: f64,
    #[serde(rename = "pub")]
    pub publications: u32,
}

impl JournalObservation {
    pub fn pub_f64(&self) -> f64 {
        f64::from(self.publications)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JournalSeries {
    id: String,
    region: Region,
    observations: Vec<JournalObservation>,
}

impl JournalSeries {
    /// Builds a series, checking every observation and the year ordering.
    pub fn new(
        id: impl Into<String>,
        region: Region,
        observations: Vec<JournalObservation>,
    ) -> Result<Self, IngestError> {
        let id = id.into();
        if observations.is_empty() {
            return Err(IngestError::EmptySeries { journal: id });
        }
        for obs in &observations {
            check_observation(obs.year.into(), obs.jif, obs.pub_f64(), Location::Whole)?;
        }
        if observations.windows(2).any(|w| w[1].year <= w[0].year) {
            return Err(IngestError::UnorderedYears { journal: id });
        }
        Ok(Self {
            id,
            region,
            observations,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn observations(&self) -> &[JournalObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn observation_in(&self, year: i32) -> Option<&JournalObservation> {
        self.observations
            .binary_search_by_key(&year, |o| o.year)
            .ok()
            .map(|i| &self.observations[i])
    }

    /// Observations in `[from, to]` (either bound optional). Returns `None`
    /// if nothing is left.
    pub fn windowed(&self, from: Option<i32>, to: Option<i32>) -> Option<JournalSeries> {
        let observations: Vec<_> = self
            .observations
            .iter()
            .filter(|o| from.is_none_or(|f| o.year >= f) && to.is_none_or(|t| o.year <= t))
            .copied()
            .collect();
        if observations.is_empty() {
            None
        } else {
            Some(JournalSeries {
                id: self.id.clone(),
                region: self.region,
                observations,
            })
        }
    }
}

/// A named set of journals with unique ids, kept sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    name: String,
    journals: Vec<JournalSeries>,
}

impl Portfolio {
    pub fn new(name: impl Into<String>, mut journals: Vec<JournalSeries>) -> Result<Self, IngestError> {
        journals.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = journals.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(IngestError::DuplicateJournal {
                at: Location::Whole,
                journal: w[0].id.clone(),
            });
        }
        Ok(Self {
            name: name.into(),
            journals,
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            journals: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn journals(&self) -> &[JournalSeries] {
        &self.journals
    }

    pub fn len(&self) -> usize {
        self.journals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&JournalSeries> {
        self.journals
            .binary_search_by(|j| j.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.journals[i])
    }

    pub fn observation_count(&self) -> usize {
        self.journals.iter().map(JournalSeries::len).sum()
    }

    /// Restricts every series to `[from, to]`, dropping series left empty.
    pub fn windowed(&self, from: Option<i32>, to: Option<i32>) -> Portfolio {
        Portfolio {
            name: self.name.clone(),
            journals: self
                .journals
                .iter()
                .filter_map(|j| j.windowed(from, to))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// Guesses the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InputFormat::Json,
            _ => InputFormat::Csv,
        }
    }
}

fn check_observation(year: i64, jif: f64, pubs: f64, at: Location) -> Result<(), IngestError> {
    if !(i64::from(MIN_YEAR)..=i64::from(MAX_YEAR)).contains(&year) {
        return Err(IngestError::YearOutOfRange { at, year });
    }
    if !jif.is_finite() || jif <= 0.0 {
        return Err(IngestError::NonPositiveJif { at, value: jif });
    }
    if !pubs.is_finite() || pubs < 1.0 {
        return Err(IngestError::NonPositivePub { at, value: pubs });
    }
    if pubs.fract() != 0.0 {
        return Err(IngestError::FractionalPub { at, value: pubs });
    }
    if pubs > f64::from(u32::MAX) {
        return Err(IngestError::Malformed {
            at,
            message: format!("pub {pubs} too large"),
        });
    }
    Ok(())
}

struct RawRow {
    at: Location,
    id: String,
    region: Region,
    obs: JournalObservation,
}

/// Outcome of a lenient parse: whatever could be assembled plus every
/// problem found along the way.
#[derive(Debug)]
pub struct Validation {
    pub portfolio: Portfolio,
    pub violations: Vec<IngestError>,
}

impl Validation {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Parses a portfolio, failing on the first violation.
pub fn parse_portfolio<R: Read>(source: R, format: InputFormat) -> Result<Portfolio, IngestError> {
    let mut validation = validate_portfolio(source, format)?;
    if validation.violations.is_empty() {
        Ok(validation.portfolio)
    } else {
        Err(validation.violations.swap_remove(0))
    }
}

/// Parses a portfolio, collecting every row-level violation instead of
/// stopping at the first. Only I/O and structural failures (bad header,
/// JSON syntax) are returned as `Err`.
pub fn validate_portfolio<R: Read>(source: R, format: InputFormat) -> Result<Validation, IngestError> {
    let (rows, mut violations) = match format {
        InputFormat::Csv => read_csv_rows(source)?,
        InputFormat::Json => read_json_rows(source)?,
    };
    let portfolio = assemble(rows, &mut violations);
    Ok(Validation {
        portfolio,
        violations,
    })
}

fn assemble(rows: Vec<RawRow>, violations: &mut Vec<IngestError>) -> Portfolio {
    let mut grouped: BTreeMap<String, (Region, Location, BTreeMap<i32, JournalObservation>)> =
        BTreeMap::new();
    for row in rows {
        let entry = grouped
            .entry(row.id.clone())
            .or_insert_with(|| (row.region, row.at, BTreeMap::new()));
        if entry.0 != row.region {
            violations.push(IngestError::Malformed {
                at: row.at,
                message: format!(
                    "journal {} tagged {} here but {} at {}",
                    row.id, row.region, entry.0, entry.1
                ),
            });
            continue;
        }
        if entry.2.insert(row.obs.year, row.obs).is_some() {
            violations.push(IngestError::DuplicateObservation {
                at: row.at,
                journal: row.id,
                year: row.obs.year,
            });
        }
    }
    let journals = grouped
        .into_iter()
        .map(|(id, (region, _, obs))| JournalSeries {
            id,
            region,
            observations: obs.into_values().collect(),
        })
        .collect();
    Portfolio {
        name: "portfolio".to_string(),
        journals,
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source)
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(IngestError::Header {
            at: Location::Line(1),
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

fn csv_error(err: csv::Error) -> IngestError {
    let at = err
        .position()
        .map_or(Location::Whole, |p| Location::Line(p.line()));
    match err.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        kind => IngestError::Malformed {
            at,
            message: format!("{kind:?}"),
        },
    }
}

fn field<'r>(record: &'r csv::StringRecord, idx: usize, name: &str, at: Location) -> Result<&'r str, IngestError> {
    match record.get(idx) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(IngestError::Malformed {
            at,
            message: format!("missing {name}"),
        }),
    }
}

fn parse_num<T: FromStr>(text: &str, name: &str, at: Location) -> Result<T, IngestError> {
    text.parse().map_err(|_| IngestError::Malformed {
        at,
        message: format!("invalid {name} `{text}`"),
    })
}

fn read_csv_rows<R: Read>(source: R) -> Result<(Vec<RawRow>, Vec<IngestError>), IngestError> {
    let mut reader = csv_reader(source);
    check_header(reader.headers().map_err(csv_error)?, &PORTFOLIO_HEADER)?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let e = csv_error(e);
                if let IngestError::Io(_) = e {
                    return Err(e);
                }
                violations.push(e);
                continue;
            }
        };
        let at = Location::Line(record.position().map_or(0, |p| p.line()));
        match csv_row(&record, at) {
            Ok(row) => rows.push(row),
            Err(e) => violations.push(e),
        }
    }
    Ok((rows, violations))
}

fn csv_row(record: &csv::StringRecord, at: Location) -> Result<RawRow, IngestError> {
    if record.len() != PORTFOLIO_HEADER.len() {
        return Err(IngestError::Malformed {
            at,
            message: format!("expected {} fields, found {}", PORTFOLIO_HEADER.len(), record.len()),
        });
    }
    let id = field(record, 0, "journal_id", at)?.to_string();
    let region_tag = field(record, 1, "region", at)?;
    let year: i64 = parse_num(field(record, 2, "year", at)?, "year", at)?;
    let jif: f64 = parse_num(field(record, 3, "jif", at)?, "jif", at)?;
    let pubs: f64 = parse_num(field(record, 4, "pub", at)?, "pub", at)?;
    raw_row(id, region_tag, year, jif, pubs, at)
}

fn raw_row(id: String, region_tag: &str, year: i64, jif: f64, pubs: f64, at: Location) -> Result<RawRow, IngestError> {
    let region = region_tag
        .parse::<Region>()
        .map_err(|tag| IngestError::UnknownRegion { at, tag })?;
    check_observation(year, jif, pubs, at)?;
    Ok(RawRow {
        at,
        id,
        region,
        obs: JournalObservation {
            year: year as i32,
            jif,
            publications: pubs as u32,
        },
    })
}

#[derive(Deserialize)]
struct JsonObservation {
    year: i64,
    jif: f64,
    #[serde(rename = "pub")]
    publications: f64,
}

#[derive(Deserialize)]
struct JsonSeries {
    id: String,
    region: String,
    observations: Vec<JsonObservation>,
}

fn read_json_rows<R: Read>(source: R) -> Result<(Vec<RawRow>, Vec<IngestError>), IngestError> {
    let series: Vec<JsonSeries> = serde_json::from_reader(source).map_err(|e| {
        if e.is_io() {
            IngestError::Io(e.into())
        } else {
            IngestError::Json {
                at: Location::Line(e.line() as u64),
                message: e.to_string(),
            }
        }
    })?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut seen = BTreeMap::new();
    for (si, s) in series.into_iter().enumerate() {
        let series_at = Location::Record {
            series: si,
            observation: None,
        };
        if seen.insert(s.id.clone(), si).is_some() {
            violations.push(IngestError::DuplicateJournal {
                at: series_at,
                journal: s.id,
            });
            continue;
        }
        if s.observations.is_empty() {
            violations.push(IngestError::EmptySeries { journal: s.id });
            continue;
        }
        for (oi, o) in s.observations.into_iter().enumerate() {
            let at = Location::Record {
                series: si,
                observation: Some(oi),
            };
            match raw_row(s.id.clone(), &s.region, o.year, o.jif, o.publications, at) {
                Ok(row) => rows.push(row),
                Err(e) => violations.push(e),
            }
        }
    }
    Ok((rows, violations))
}

/// Writes a portfolio as CSV in canonical (id, year) order.
pub fn write_portfolio_csv<W: Write>(portfolio: &Portfolio, sink: W) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(PORTFOLIO_HEADER).map_err(csv_error)?;
    for j in &portfolio.journals {
        for o in &j.observations {
            writer
                .write_record([
                    j.id.clone(),
                    j.region.to_string(),
                    o.year.to_string(),
                    o.jif.to_string(),
                    o.publications.to_string(),
                ])
                .map_err(csv_error)?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonSeriesOut<'a> {
    id: &'a str,
    region: Region,
    observations: &'a [JournalObservation],
}

pub fn write_portfolio_json<W: Write>(portfolio: &Portfolio, sink: W) -> Result<(), IngestError> {
    let out: Vec<_> = portfolio
        .journals
        .iter()
        .map(|j| JsonSeriesOut {
            id: &j.id,
            region: j.region,
            observations: &j.observations,
        })
        .collect();
    serde_json::to_writer_pretty(sink, &out).map_err(|e| IngestError::Json {
        at: Location::Whole,
        message: e.to_string(),
    })
}

/// Result of splitting a portfolio on the minimum number of (JIF, PUB) pairs.
#[derive(Debug, Clone)]
pub struct Eligibility {
    pub eligible: Portfolio,
    pub excluded: Vec<String>,
}

/// Keeps series with at least `min_pairs` observations.
///
/// Panics if `min_pairs < 2`; a single observation cannot form an
/// elasticity pair.
pub fn filter_eligible(portfolio: &Portfolio, min_pairs: usize) -> Eligibility {
    assert!(min_pairs >= 2, "min_pairs must be at least 2, got {min_pairs}");
    let (eligible, excluded): (Vec<_>, Vec<_>) = portfolio
        .journals
        .iter()
        .cloned()
        .partition(|j| j.len() >= min_pairs);
    Eligibility {
        eligible: Portfolio {
            name: portfolio.name.clone(),
            journals: eligible,
        },
        excluded: excluded.into_iter().map(|j| j.id).collect(),
    }
}

/// One year of national publication counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NationalYearStats {
    pub year: i32,
    pub sci_oa: u64,
    pub sci_total: u64,
    pub oa_in_domestic: u64,
    pub total_in_domestic: u64,
}

impl NationalYearStats {
    pub fn check(&self, at: Location) -> Result<(), IngestError> {
        let violation = |message: &str| IngestError::CountInvariant {
            at,
            year: self.year,
            message: message.to_string(),
        };
        if self.oa_in_domestic > self.sci_oa {
            return Err(violation("oa_in_domestic exceeds sci_oa"));
        }
        if self.oa_in_domestic > self.total_in_domestic {
            return Err(violation("oa_in_domestic exceeds total_in_domestic"));
        }
        if self.sci_oa > self.sci_total {
            return Err(violation("sci_oa exceeds sci_total"));
        }
        Ok(())
    }
}

/// Parses national statistics; output is sorted by year.
pub fn parse_national_stats<R: Read>(source: R) -> Result<Vec<NationalYearStats>, IngestError> {
    let mut reader = csv_reader(source);
    check_header(reader.headers().map_err(csv_error)?, &NATIONAL_HEADER)?;
    let mut by_year = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let at = Location::Line(record.position().map_or(0, |p| p.line()));
        if record.len() != NATIONAL_HEADER.len() {
            return Err(IngestError::Malformed {
                at,
                message: format!("expected {} fields, found {}", NATIONAL_HEADER.len(), record.len()),
            });
        }
        let year: i64 = parse_num(field(&record, 0, "year", at)?, "year", at)?;
        if !(i64::from(MIN_YEAR)..=i64::from(MAX_YEAR)).contains(&year) {
            return Err(IngestError::YearOutOfRange { at, year });
        }
        let mut counts = [0u64; 4];
        for (i, slot) in counts.iter_mut().enumerate() {
            let name = NATIONAL_HEADER[i + 1];
            *slot = parse_num(field(&record, i + 1, name, at)?, name, at)?;
        }
        let stats = NationalYearStats {
            year: year as i32,
            sci_oa: counts[0],
            sci_total: counts[1],
            oa_in_domestic: counts[2],
            total_in_domestic: counts[3],
        };
        stats.check(at)?;
        if by_year.insert(stats.year, stats).is_some() {
            return Err(IngestError::DuplicateYear {
                at,
                year: stats.year,
            });
        }
    }
    Ok(by_year.into_values().collect())
}
