//! Run reports: a TOML summary plus flat CSV tables.
//!
//! A report directory holds
//!
//! - `report.toml`: configuration echo and scalar outcomes,
//! - `trace.csv`: `iteration,sum_omega`, one line per iteration,
//! - `assignments.csv`: `index,cluster,label`.
//!
//! Sweeps write `sweep.csv` with one row per b. Floats are written in Rust's
//! shortest round-trip form so reading a report back is lossless.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::pipeline::{ClusterResult, StopReason, SweepEntry};

pub const REPORT_FILE: &str = "report.toml";
pub const TRACE_FILE: &str = "trace.csv";
pub const ASSIGNMENTS_FILE: &str = "assignments.csv";
pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub params: ModelParams,
    pub range: f64,
    pub epsilon: f64,
    pub target_clusters: Option<usize>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub raw_cluster_count: usize,
    pub merged_cluster_count: usize,
    pub accuracy: Option<f64>,
    pub duration_secs: f64,
    #[serde(skip)]
    pub trace: Vec<f64>,
    #[serde(skip)]
    pub assignments: Vec<usize>,
    #[serde(skip)]
    pub labels: Option<Vec<String>>,
}

impl RunReport {
    pub fn from_result(
        dataset: impl Into<String>,
        params: &ModelParams,
        target_clusters: Option<usize>,
        result: &ClusterResult,
        labels: Option<&[String]>,
        duration_secs: f64,
    ) -> Self {
        Self {
            dataset: dataset.into(),
            params: params.clone(),
            range: result.range,
            epsilon: result.epsilon,
            target_clusters,
            iterations: result.iterations,
            stop_reason: result.stop_reason,
            raw_cluster_count: result.raw_cluster_count,
            merged_cluster_count: result.merged_cluster_count,
            accuracy: result.accuracy,
            duration_secs,
            trace: result.convergence_trace.clone(),
            assignments: result.assignments.clone(),
            labels: labels.map(<[String]>::to_vec),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn csv_writer() -> csv::WriterBuilder {
    let mut b = csv::WriterBuilder::new();
    b.terminator(csv::Terminator::Any(b'\n'));
    b
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Report(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_run_report(report: &RunReport, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let toml = toml::to_string(report).map_err(|e| Error::Report(e.to_string()))?;
    write_file(&dir.join(REPORT_FILE), &toml)?;

    let path = dir.join(TRACE_FILE);
    let mut w = csv_writer().from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["iteration", "sum_omega"]).map_err(csv_err(&path))?;
    for (it, v) in report.trace.iter().enumerate() {
        w.write_record([(it + 1).to_string(), v.to_string()]).map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(ASSIGNMENTS_FILE);
    let mut w = csv_writer().from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["index", "cluster", "label"]).map_err(csv_err(&path))?;
    for (i, c) in report.assignments.iter().enumerate() {
        let label = report.labels.as_ref().map_or("", |l| l[i].as_str());
        w.write_record([i.to_string(), c.to_string(), label.to_string()])
            .map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

pub fn read_run_report(dir: impl AsRef<Path>) -> Result<RunReport> {
    let dir = dir.as_ref();
    let mut report: RunReport =
        toml::from_str(&read_file(&dir.join(REPORT_FILE))?).map_err(|e| Error::Report(e.to_string()))?;

    let path = dir.join(TRACE_FILE);
    let mut r = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
    for rec in r.records() {
        let rec = rec.map_err(csv_err(&path))?;
        report.trace.push(parse_field(&rec, 1, &path)?);
    }

    let path = dir.join(ASSIGNMENTS_FILE);
    let mut r = csv::Reader::from_path(&path).map_err(csv_err(&path))?;
    let mut labels = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err(&path))?;
        report.assignments.push(parse_field(&rec, 1, &path)?);
        labels.push(rec.get(2).unwrap_or("").to_string());
    }
    report.labels = labels.iter().any(|l| !l.is_empty()).then_some(labels);
    Ok(report)
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, path: &Path) -> Result<T> {
    rec.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Report(format!("{}: bad field {idx} in {rec:?}", path.display())))
}

/// One b of a sweep; RW2 cluster counts are trial means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub b: usize,
    #[serde(rename = "R")]
    pub range: f64,
    pub raw_clusters: f64,
    pub merged_clusters: f64,
    pub accuracy_mean: Option<f64>,
    pub accuracy_var: Option<f64>,
    pub accuracy_max: Option<f64>,
}

impl From<&SweepEntry> for SweepRow {
    fn from(e: &SweepEntry) -> Self {
        Self {
            b: e.b,
            range: e.range,
            raw_clusters: e.mean_raw_clusters(),
            merged_clusters: e.mean_merged_clusters(),
            accuracy_mean: e.accuracy.map(|a| a.mean),
            accuracy_var: e.accuracy.map(|a| a.variance),
            accuracy_max: e.accuracy.map(|a| a.max),
        }
    }
}

pub fn write_sweep_table(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut w = csv_writer().from_path(path).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_sweep_table(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize().map(|row| row.map_err(csv_err(path))).collect()
}
