//! Typed tables rendered to CSV, JSON, or Markdown.

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("row has {got} cells but the table has {expected} columns")]
    RowWidth { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Integer(i64),
    Real { value: f64, decimals: usize },
    /// A ratio shown as a percentage with one decimal.
    Percent(f64),
    Bool(bool),
    Missing,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    /// Real number at the default three decimals.
    pub fn real(value: f64) -> Self {
        Cell::Real { value, decimals: 3 }
    }

    pub fn real_with(value: f64, decimals: usize) -> Self {
        Cell::Real { value, decimals }
    }

    pub fn opt_real(value: Option<f64>) -> Self {
        value.map_or(Cell::Missing, Cell::real)
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Integer(i) => i.to_string(),
            Cell::Real { value, decimals } => fixed(*value, *decimals),
            Cell::Percent(r) => format!("{}%", fixed(r * 100.0, 1)),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Integer(i) => json!(i),
            Cell::Real { value, decimals } => rounded_number(*value, *decimals),
            Cell::Percent(r) => rounded_number(r * 100.0, 1),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

/// Fixed-point formatting without a negative sign on zero.
fn fixed(value: f64, decimals: usize) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let s = format!("{value:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

fn rounded_number(value: f64, decimals: usize) -> Value {
    fixed(value, decimals)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
            TableFormat::Markdown => "md",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableDoc {
    pub title: String,
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
    pub footnotes: Vec<String>,
}

impl TableDoc {
    pub fn new<S: Into<String>>(title: impl Into<String>, headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            title: title.into(),
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            footnotes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<(), TableError> {
        if row.len() != self.headers.len() {
            return Err(TableError::RowWidth {
                expected: self.headers.len(),
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_footnote(mut self, note: impl Into<String>) -> Self {
        self.footnotes.push(note.into());
        self
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "title": self.title,
            "columns": self.headers,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "footnotes": self.footnotes,
        })
    }
}

/// Renders a table. CSV carries only the header and rows; JSON and
/// Markdown also carry the title and footnotes.
pub fn render_table(doc: &TableDoc, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => render_csv(doc),
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc.to_json_value()).expect("table serializes");
            s.push('\n');
            s
        }
        TableFormat::Markdown => render_markdown(doc),
    }
}

fn render_csv(doc: &TableDoc) -> String {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    writer.write_record(&doc.headers).expect("in-memory write");
    for row in &doc.rows {
        writer
            .write_record(row.iter().map(Cell::display))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn render_markdown(doc: &TableDoc) -> String {
    let mut out = format!("### {}\n\n", doc.title);
    let header: Vec<String> = doc.headers.iter().map(|h| md_escape(h)).collect();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(doc.headers.len())));
    for row in &doc.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Missing => "-".to_string(),
                other => md_escape(&other.display()),
            })
            .collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    if !doc.footnotes.is_empty() {
        out.push('\n');
        for note in &doc.footnotes {
            out.push_str(&format!("> {note}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shares() -> TableDoc {
        let mut doc = TableDoc::new("shares", ["year", "a", "b", "c"]).with_footnote("note");
        doc.push_row(vec![
            Cell::Integer(2017),
            Cell::Percent(141389.0 / 461602.0),
            Cell::Percent(8537.0 / 141389.0),
            Cell::Percent(8537.0 / 24001.0),
        ])
        .unwrap();
        doc
    }

    #[test]
    fn csv_row_matches_published_percentages() {
        let out = render_table(&shares(), TableFormat::Csv);
        assert_eq!(out.lines().nth(1), Some("2017,30.6%,6.0%,35.6%"));
    }

    #[test]
    fn empty_table_is_header_only() {
        let doc = TableDoc::new("t", ["x", "y"]);
        assert_eq!(render_table(&doc, TableFormat::Csv), "x,y\r\n");
        let md = render_table(&doc, TableFormat::Markdown);
        assert!(md.ends_with("| x | y |\n|---|---|\n"));
    }

    #[test]
    fn rendering_is_deterministic() {
        for f in [TableFormat::Csv, TableFormat::Json, TableFormat::Markdown] {
            assert_eq!(render_table(&shares(), f), render_table(&shares(), f));
        }
    }

    #[test]
    fn csv_quotes_and_widths() {
        let mut doc = TableDoc::new("t", ["name", "v"]);
        doc.push_row(vec![Cell::text("a,b \"c\""), Cell::real(-0.0001)]).unwrap();
        assert_eq!(render_table(&doc, TableFormat::Csv).lines().nth(1), Some("\"a,b \"\"c\"\"\",0.000"));
        assert_eq!(
            doc.push_row(vec![Cell::Missing]),
            Err(TableError::RowWidth { expected: 2, got: 1 })
        );
    }

    #[test]
    fn json_keeps_column_order_and_rounds() {
        let v = shares().to_json_value();
        assert_eq!(v["columns"][0], "year");
        assert_eq!(v["rows"][0][1], 30.6);
        assert_eq!(v["footnotes"][0], "note");
        let mut doc = TableDoc::new("t", ["x"]);
        doc.push_row(vec![Cell::opt_real(None)]).unwrap();
        assert_eq!(doc.to_json_value()["rows"][0][0], Value::Null);
    }
}
