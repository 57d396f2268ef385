//! CSV tables and JSON reports.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::config::Config;

/// A scalar outcome compared against its acceptance threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub value: f64,
    pub tolerance: f64,
    /// `at_most`, `at_least` or `within` (of `target`).
    pub check: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub pass: bool,
}

impl Metric {
    pub fn at_most(value: f64, tolerance: f64) -> Self {
        Self { value, tolerance, check: "at_most", target: None, pass: value <= tolerance }
    }

    pub fn at_least(value: f64, tolerance: f64) -> Self {
        Self { value, tolerance, check: "at_least", target: None, pass: value >= tolerance }
    }

    pub fn within(value: f64, target: f64, tolerance: f64) -> Self {
        Self { value, tolerance, check: "within", target: Some(target), pass: (value - target).abs() <= tolerance }
    }

    /// A yes/no property, reported as 1 or 0.
    pub fn holds(ok: bool) -> Self {
        Self { value: f64::from(u8::from(ok)), tolerance: 1.0, check: "at_least", target: None, pass: ok }
    }
}

/// Table rows plus named metrics of one study run.
#[derive(Clone, Debug, Default)]
pub struct StudyOutput {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub metrics: BTreeMap<String, Metric>,
}

impl StudyOutput {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn row(&mut self, values: impl IntoIterator<Item = String>) {
        self.rows.push(values.into_iter().collect());
    }

    pub fn metric(&mut self, name: &str, m: Metric) {
        self.metrics.insert(name.to_string(), m);
    }

    pub fn passed(&self) -> bool {
        self.metrics.values().all(|m| m.pass)
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`; returns both paths.
    pub fn write(&self, dir: &Path, name: &str, config: &Config, runtime_seconds: f64) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        let json_path = dir.join(format!("{name}.json"));
        let report = Report { config, metrics: &self.metrics, runtime_seconds };
        serde_json::to_writer_pretty(BufWriter::new(File::create(&json_path)?), &report)?;
        Ok((csv_path, json_path))
    }
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a Config,
    metrics: &'a BTreeMap<String, Metric>,
    runtime_seconds: f64,
}

/// Formats a float losslessly for CSV.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}
