use std::io::Write;
use std::path::Path;

use risbound_core::bounds::{BoundKind, BoundReport};
use risbound_core::optimizers::OptimizerResult;
use serde::Serialize;

use crate::config::{Format, Method};
use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 10] = [
    "scenario",
    "n_s",
    "load_set",
    "method",
    "value",
    "capacity_bps_hz",
    "valid",
    "config",
    "runtime_ms",
    "seed",
];

/// Diagnostic key set on bounds that do not apply to the loads in use.
pub const NOT_APPLICABLE: &str = "not_applicable";

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    #[serde(flatten)]
    pub report: BoundReport,
    /// Capacity at `|h|^2 = value`; absent when the bound is invalid.
    pub capacity_bps_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl BoundEntry {
    pub fn not_applicable(&self) -> bool {
        self.report.diagnostics.contains_key(NOT_APPLICABLE)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerEntry {
    pub method: Method,
    #[serde(flatten)]
    pub result: OptimizerResult,
    pub capacity_bps_hz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Results for one model size.
#[derive(Debug, Clone, Serialize)]
pub struct Point {
    pub n_s: usize,
    pub bounds: Vec<BoundEntry>,
    pub optimizers: Vec<OptimizerEntry>,
}

impl Point {
    pub fn bound(&self, kind: BoundKind) -> Option<&BoundEntry> {
        self.bounds.iter().find(|b| b.report.kind == kind)
    }

    pub fn optimizer(&self, method: Method) -> Option<&OptimizerEntry> {
        self.optimizers.iter().find(|o| o.method == method)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub load_set: String,
    pub seed: u64,
    pub p_t_mw: f64,
    pub sigma2_mw: f64,
    pub points: Vec<Point>,
    /// Computations that failed; any entry makes the run exit with status 3.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

fn number(x: f64) -> String {
    format!("{x}")
}

fn ms(t: Option<f64>) -> String {
    t.map(|t| format!("{t:.3}")).unwrap_or_default()
}

impl Report {
    pub fn csv_rows(&self) -> Vec<[String; 10]> {
        let mut rows = Vec::new();
        for p in &self.points {
            for b in &p.bounds {
                let value = match b.report.value {
                    Some(v) => number(v),
                    None if b.not_applicable() => "N/A".to_string(),
                    None => String::new(),
                };
                rows.push([
                    self.scenario.clone(),
                    p.n_s.to_string(),
                    self.load_set.clone(),
                    b.report.kind.name().to_string(),
                    value,
                    b.capacity_bps_hz.map(number).unwrap_or_default(),
                    b.report.valid.to_string(),
                    String::new(),
                    ms(b.runtime_ms),
                    self.seed.to_string(),
                ]);
            }
            for o in &p.optimizers {
                rows.push([
                    self.scenario.clone(),
                    p.n_s.to_string(),
                    self.load_set.clone(),
                    o.method.name().to_string(),
                    number(o.result.gain),
                    number(o.capacity_bps_hz),
                    "true".to_string(),
                    o.result.v.to_string(),
                    ms(o.runtime_ms),
                    self.seed.to_string(),
                ]);
            }
        }
        rows
    }

    pub fn to_csv(&self) -> String {
        write_csv(&CSV_HEADER, self.csv_rows())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

pub fn write_csv<const N: usize>(header: &[&str; N], rows: Vec<[String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}
