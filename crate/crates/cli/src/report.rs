//! Experiment reports and their CSV, JSON and terminal renderings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How a column's numbers were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Input,
    Brute,
    Transfer,
    Contour,
    Sampled,
    ClosedForm,
    Derived,
}

impl From<ising_core::Method> for Tag {
    fn from(m: ising_core::Method) -> Self {
        match m {
            ising_core::Method::Brute => Tag::Brute,
            ising_core::Method::Transfer => Tag::Transfer,
            ising_core::Method::Contour => Tag::Contour,
            ising_core::Method::Sampled => Tag::Sampled,
        }
    }
}

impl From<ising_core::ExactMethod> for Tag {
    fn from(m: ising_core::ExactMethod) -> Self {
        ising_core::Method::from(m).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub method: Tag,
    /// What bounds the error of this column's numbers.
    pub error_bound: String,
}

impl Column {
    pub fn new(name: &str, method: Tag, error_bound: &str) -> Self {
        Self {
            name: name.to_string(),
            method,
            error_bound: error_bound.to_string(),
        }
    }

    pub fn input(name: &str) -> Self {
        Self::new(name, Tag::Input, "exact")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub version: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Value>>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            columns: Vec::new(),
            rows: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            wall_clock_seconds: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of a column, in row order.
    pub fn column_values(&self, name: &str) -> Vec<f64> {
        let k = self.column_index(name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[k].as_f64().unwrap_or(f64::NAN)).collect()
    }

    /// The results table as CSV. Deterministic: no timings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| csv_field(&c.name)).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| csv_field(&plain(v))).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned table with method tags, followed by checks and notes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "ising {} (v{})", self.command, self.version).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "  {k} = {v}").unwrap();
        }
        let heads: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{} [{}]", c.name, tag_name(c.method)))
            .collect();
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(pretty).collect()).collect();
        let widths: Vec<usize> = (0..heads.len())
            .map(|k| cells.iter().map(|r| r[k].len()).chain([heads[k].chars().count()]).max().unwrap_or(0))
            .collect();
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}", w = w))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out).unwrap();
        writeln!(out, "{}", line(&heads)).unwrap();
        for r in &cells {
            writeln!(out, "{}", line(r)).unwrap();
        }
        let bounds: Vec<String> = self
            .columns
            .iter()
            .filter(|c| c.method != Tag::Input)
            .map(|c| format!("  {}: {}", c.name, c.error_bound))
            .collect();
        if !bounds.is_empty() {
            writeln!(out, "\nerror bounds:").unwrap();
            for b in bounds {
                writeln!(out, "{b}").unwrap();
            }
        }
        if !self.checks.is_empty() {
            writeln!(out, "\nchecks:").unwrap();
            for c in &self.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "  [{mark}] {}: {}", c.name, c.detail).unwrap();
            }
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        writeln!(out, "wall clock: {:.3} s", self.wall_clock_seconds).unwrap();
        out
    }

    pub fn write(&self, format: OutputFormat, path: &Path) -> std::io::Result<()> {
        let text = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        };
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format `{other}` (csv or json)")),
        }
    }
}

/// Measures a command and stamps the report.
pub struct Stopwatch(Instant);

impl Stopwatch {
    pub fn start() -> Self {
        Self(Instant::now())
    }

    pub fn stamp(&self, report: &mut ExperimentReport) {
        report.wall_clock_seconds = self.0.elapsed().as_secs_f64();
    }
}

fn tag_name(t: Tag) -> &'static str {
    match t {
        Tag::Input => "input",
        Tag::Brute => "brute",
        Tag::Transfer => "transfer",
        Tag::Contour => "contour",
        Tag::Sampled => "sampled",
        Tag::ClosedForm => "closed-form",
        Tag::Derived => "derived",
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn pretty(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
                format!("{x:.6e}")
            } else {
                format!("{x:.9}")
            }
        }
        other => plain(other),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
