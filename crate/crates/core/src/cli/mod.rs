//! Command-line front end: `validate`, `analyze`, `curves`, `shares`.
//!
//! Settings resolve in the order flag, configuration file, built-in default.
//! Standard output carries only report content; diagnostics go to standard
//! error.

mod commands;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::elasticity::GapPolicy;
use crate::report::TableFormat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const DEFAULT_LATEST_YEAR: i32 = 2021;
pub const DEFAULT_MIN_PAIRS: usize = 4;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_N_POINTS: usize = 101;

#[derive(Debug, Parser)]
#[command(name = "oa-elasticity", version, about = "Elasticity analysis of open-access journal output against impact factor")]
pub struct Cli {
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a portfolio file and report violations and eligibility.
    Validate(CommonArgs),
    /// Per-journal profiles, category counts, optimization aggregates, charts.
    Analyze(CommonArgs),
    /// Sampled demand and marginal-revenue curves for one journal.
    Curves(CurvesArgs),
    /// Yearly open-access share ratios from national counts.
    Shares(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Portfolio file (`.csv` or `.json`).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// National yearly counts (CSV).
    #[arg(long, value_name = "PATH")]
    pub national: Option<PathBuf>,
    /// Observations after this year are ignored; latest-year sums use it.
    #[arg(long, value_name = "INT")]
    pub latest_year: Option<i32>,
    /// Minimum number of (JIF, PUB) observations for a journal to be analysed.
    #[arg(long, value_name = "INT")]
    pub min_pairs: Option<usize>,
    /// Significance level for the correlation screen.
    #[arg(long, value_name = "FLOAT")]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, value_name = "POLICY")]
    pub gap_policy: Option<GapPolicyArg>,
    /// Output formats; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',', value_name = "FORMAT")]
    pub format: Vec<FormatArg>,
    /// Directory for output files; standard output when absent.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write SVG charts (requires `--out`).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Journal identifier.
    #[arg(long, value_name = "ID")]
    pub journal: String,
    /// Upper end of the PUB axis.
    #[arg(long, value_name = "FLOAT")]
    pub pub_max: Option<f64>,
    /// Number of evenly spaced sample points.
    #[arg(long, value_name = "INT")]
    pub n_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicyArg {
    AdjacentYears,
    AdjacentObservations,
}

impl From<GapPolicyArg> for GapPolicy {
    fn from(arg: GapPolicyArg) -> Self {
        match arg {
            GapPolicyArg::AdjacentYears => GapPolicy::AdjacentYearsOnly,
            GapPolicyArg::AdjacentObservations => GapPolicy::AdjacentObservations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
    Markdown,
}

impl From<FormatArg> for TableFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
            FormatArg::Markdown => TableFormat::Markdown,
        }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub national: Option<PathBuf>,
    pub latest_year: Option<i32>,
    pub min_pairs: Option<usize>,
    pub alpha: Option<f64>,
    pub gap_policy: Option<GapPolicyArg>,
    pub format: Option<Vec<FormatArg>>,
    pub out: Option<PathBuf>,
    pub svg: Option<bool>,
    pub n_points: Option<usize>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub national: Option<PathBuf>,
    pub latest_year: i32,
    pub gap_policy: GapPolicy,
    pub alpha: f64,
    pub min_pairs: usize,
    pub out: Option<PathBuf>,
    pub formats: Vec<TableFormat>,
    pub svg: bool,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, file: &FileConfig) -> Result<Self, CliError> {
        let formats: Vec<TableFormat> = if !args.format.is_empty() {
            args.format.iter().map(|&f| f.into()).collect()
        } else if let Some(list) = &file.format {
            list.iter().map(|&f| f.into()).collect()
        } else {
            vec![TableFormat::Csv]
        };
        let mut dedup = Vec::new();
        for f in formats {
            if !dedup.contains(&f) {
                dedup.push(f);
            }
        }
        let config = RunConfig {
            input: args.input.clone().or_else(|| file.input.clone()),
            national: args.national.clone().or_else(|| file.national.clone()),
            latest_year: args.latest_year.or(file.latest_year).unwrap_or(DEFAULT_LATEST_YEAR),
            gap_policy: args.gap_policy.or(file.gap_policy).map(Into::into).unwrap_or_default(),
            alpha: args.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA),
            min_pairs: args.min_pairs.or(file.min_pairs).unwrap_or(DEFAULT_MIN_PAIRS),
            out: args.out.clone().or_else(|| file.out.clone()),
            formats: dedup,
            svg: args.svg || file.svg.unwrap_or(false),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::usage(format!("--alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if self.min_pairs < 2 {
            return Err(CliError::usage(format!("--min-pairs must be at least 2, got {}", self.min_pairs)));
        }
        for path in [&self.input, &self.national, &self.out].into_iter().flatten() {
            if path.as_os_str().is_empty() {
                return Err(CliError::usage("paths must be non-empty"));
            }
        }
        if self.svg && self.out.is_none() {
            return Err(CliError::usage("--svg requires --out"));
        }
        Ok(())
    }

    pub fn require_input(&self) -> Result<&Path, CliError> {
        self.input.as_deref().ok_or_else(|| CliError::usage("--input is required"))
    }

    pub fn require_national(&self) -> Result<&Path, CliError> {
        self.national.as_deref().ok_or_else(|| CliError::usage("--national is required"))
    }
}

/// A failure carrying its process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new(EXIT_DATA, message)
    }

    pub fn io(path: &Path, err: &std::io::Error) -> Self {
        CliError::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, &e))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the chosen subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_DATA } else { EXIT_OK };
            let rendered = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.code
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Validate(args) => commands::validate(&RunConfig::resolve(args, &file)?, stdout, stderr),
        Command::Analyze(args) => commands::analyze(&RunConfig::resolve(args, &file)?, stdout, stderr),
        Command::Shares(args) => commands::shares(&RunConfig::resolve(args, &file)?, stdout, stderr),
        Command::Curves(args) => {
            let config = RunConfig::resolve(&args.common, &file)?;
            let n_points = args.n_points.or(file.n_points).unwrap_or(DEFAULT_N_POINTS);
            commands::curves(&config, &args.journal, args.pub_max, n_points, stdout, stderr)
        }
    }
}
