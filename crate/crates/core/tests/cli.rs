mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oa-elasticity")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(file: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(file).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn validate_clean_file() {
    let o = run(&["validate", "--input", path(&fixture("clean.csv"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("0 violations"));
    let excluded = out.split("excluded: insufficient data pairs").nth(1).unwrap();
    assert!(excluded.contains("J3"));
    assert!(!excluded.contains("J1"));
}

#[test]
fn validate_reports_bad_rows_with_line_numbers() {
    let o = run(&["validate", "--input", path(&fixture("dirty.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("jif"));
    assert!(stdout(&o).contains("1 violations"));
}

#[test]
fn missing_input_file_is_an_io_failure() {
    let o = run(&["validate", "--input", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bad_flags_are_rejected() {
    assert_eq!(run(&["analyze", "--input", "x.csv", "--alpha", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--input", "x.csv", "--min-pairs", "1"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--input", "x.csv", "--svg"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
}

#[test]
fn analyze_writes_bundle_and_keeps_stdout_clean() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--input", path(&fixture("portfolio8.csv")), "--out", path(dir.path()), "--svg"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    for name in [
        "profiles.csv",
        "categories.csv",
        "optimization.csv",
        "elasticity_distribution.csv",
        "elasticity_density.csv",
        "negative_bars.csv",
        "positive_bars.csv",
        "fig2_elasticity_violin.svg",
        "fig3_negative_china.svg",
        "fig3_negative_overseas.svg",
        "fig4_positive_china.svg",
        "fig4_positive_overseas.svg",
    ] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let categories = csv_rows(&dir.path().join("categories.csv"));
    assert_eq!(categories.len(), 8);
    assert!(categories.iter().all(|r| &r[2] == "1"));
    let svg = std::fs::read_to_string(dir.path().join("fig3_negative_china.svg")).unwrap();
    assert!(roxmltree::Document::parse(&svg).is_ok());
    assert!(svg.contains("class=\"divider\""));
}

#[test]
fn analyze_single_journal_reports_optimum() {
    let o = run(&["analyze", "--input", path(&fixture("w55.csv")), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("W55,")).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[12], "1.6942");
    assert_eq!(cells[13], "1268.3");
    assert_eq!(cells[11], "e <= -1");
}

#[test]
fn constant_jif_is_flagged_and_not_counted() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "--input", path(&fixture("undefined.csv")), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let profiles = csv_rows(&dir.path().join("profiles.csv"));
    let flat = profiles.iter().find(|r| &r[0] == "FLAT").unwrap();
    assert!(flat[15].contains("ē undefined"));
    assert_eq!(&flat[5], "");
    let counted: u32 = csv_rows(&dir.path().join("categories.csv")).iter().map(|r| r[2].parse::<u32>().unwrap()).sum();
    assert_eq!(counted, 1);
}

#[test]
fn analyze_with_nothing_eligible_fails() {
    let o = run(&["analyze", "--input", path(&fixture("clean.csv")), "--min-pairs", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no eligible journals"));
}

#[test]
fn curves_for_w55() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "curves",
        "--input",
        path(&fixture("w55.csv")),
        "--journal",
        "W55",
        "--out",
        path(dir.path()),
        "--svg",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("curves_W55.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert!(doc.descendants().any(|n| n.attribute("id") == Some("mr-zero-crossing")));
    let rows = csv_rows(&dir.path().join("curves_W55.csv"));
    assert_eq!(rows.len(), 101);
    let last: f64 = rows[100][0].parse().unwrap();
    assert!((last - 2.0 * 1268.317).abs() < 0.01);
}

#[test]
fn curves_honours_sampling_flags() {
    let o = run(&[
        "curves",
        "--input",
        path(&fixture("w55.csv")),
        "--journal",
        "W55",
        "--pub-max",
        "500",
        "--n-points",
        "11",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 12);
    assert!(out.lines().last().unwrap().starts_with("500.000,"));
}

#[test]
fn curves_error_codes() {
    let unknown = run(&["curves", "--input", path(&fixture("w55.csv")), "--journal", "W99"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr(&unknown).contains("journal not found"));
    let flat = run(&["curves", "--input", path(&fixture("undefined.csv")), "--journal", "FLAT"]);
    assert_eq!(flat.status.code(), Some(3));
    assert!(stderr(&flat).contains("undefined"));
}

#[test]
fn shares_table() {
    let o = run(&["shares", "--national", path(&fixture("table1.csv"))]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "year,oa_share,domestic_capture,domestic_oa_intensity\r\n\
                    2017,30.6%,6.0%,35.6%\r\n\
                    2018,31.9%,5.6%,36.0%\r\n\
                    2019,34.5%,5.6%,42.6%\r\n\
                    2020,38.7%,7.0%,50.2%\r\n\
                    2021,39.9%,7.3%,51.9%\r\n\
                    2022,44.9%,5.7%,49.1%\r\n";
    assert_eq!(stdout(&o), expected);

    let md = run(&["shares", "--national", path(&fixture("table1.csv")), "--format", "markdown"]);
    assert!(stdout(&md).contains("SCI_OA-J / SCI_China"));
}

#[test]
fn shares_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.csv");
    std::fs::write(&single, "year,sci_oa,sci_total,oa_in_domestic,total_in_domestic\n2021,284063,711085,20631,39755\n").unwrap();
    let o = run(&["shares", "--national", path(&single)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);

    let zero = dir.path().join("zero.csv");
    std::fs::write(&zero, "year,sci_oa,sci_total,oa_in_domestic,total_in_domestic\n2019,0,0,0,10\n").unwrap();
    let o = run(&["shares", "--national", path(&zero)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("2019"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, format!("national = {:?}\nformat = [\"json\"]\n", path(&fixture("table1.csv")))).unwrap();
    let o = run(&["shares", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rows"][0][1], 30.6);
    let o = run(&["shares", "--config", path(&cfg), "--format", "csv"]);
    assert!(stdout(&o).starts_with("year,"));
}
