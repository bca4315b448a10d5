//! CSV distribution files and JSON run manifests.
//!
//! Every CSV starts with `# key=value` metadata lines followed by a header
//! row. Values are written in shortest round-trip form, so reading a file
//! back reproduces the distribution exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use contam_runs::montecarlo::{EmpiricalDistribution, ExperimentConfig, ReferenceCdf};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const EMPIRICAL_HEADER: [&str; 3] = ["value", "count", "ecdf"];
pub const REFERENCE_HEADER: [&str; 2] = ["value", "cdf"];
pub const COMPARISON_HEADER: [&str; 3] = ["value", "ecdf", "reference_cdf"];

pub type Metadata = BTreeMap<String, String>;

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn csv_text(meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = Vec::new();
    for (k, v) in meta {
        writeln!(out, "# {k}={v}").expect("writing to a Vec");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).expect("writing to a Vec");
    for r in rows {
        w.write_record(r).expect("writing to a Vec");
    }
    w.into_inner().expect("flushing a Vec")
}

pub fn write_empirical(path: &Path, meta: &Metadata, e: &EmpiricalDistribution) -> CliResult<()> {
    let rows: Vec<Vec<String>> = e
        .support()
        .iter()
        .zip(e.weights())
        .map(|(&x, &w)| vec![x.to_string(), w.to_string(), e.ecdf(x).to_string()])
        .collect();
    write_file(path, &csv_text(meta, &EMPIRICAL_HEADER, &rows))
}

pub fn write_reference(path: &Path, meta: &Metadata, grid: &[f64], cdf: &dyn ReferenceCdf) -> CliResult<()> {
    let rows: Vec<Vec<String>> = grid.iter().map(|&x| vec![x.to_string(), cdf.cdf(x).to_string()]).collect();
    write_file(path, &csv_text(meta, &REFERENCE_HEADER, &rows))
}

pub fn write_comparison(path: &Path, meta: &Metadata, rows: &[ComparisonRow]) -> CliResult<()> {
    let rows: Vec<Vec<String>> =
        rows.iter().map(|r| vec![r.value.to_string(), r.ecdf.to_string(), r.reference.to_string()]).collect();
    write_file(path, &csv_text(meta, &COMPARISON_HEADER, &rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub value: f64,
    pub ecdf: f64,
    pub reference: f64,
}

/// A parsed CSV file: metadata, header and data rows with their line numbers.
pub struct CsvFile {
    pub path: PathBuf,
    pub meta: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<(u64, Vec<String>)>,
}

pub fn read_csv(path: &Path) -> CliResult<CsvFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut meta = Metadata::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
    }
    let parse_err = |line: u64, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(|f| f.trim().to_string()).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if header.is_none() {
            header = Some(fields);
        } else {
            rows.push((line, fields));
        }
    }
    let header = header.ok_or_else(|| parse_err(1, "missing header row".into()))?;
    Ok(CsvFile { path: path.to_path_buf(), meta, header, rows })
}

impl CsvFile {
    fn err(&self, line: u64, message: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.clone(), line, message: message.into() }
    }

    fn expect_header(&self, expected: &[&str]) -> CliResult<()> {
        if self.header.len() < expected.len() || self.header.iter().zip(expected).any(|(a, b)| a != b) {
            return Err(self.err(0, format!("expected header {}, found {}", expected.join(","), self.header.join(","))));
        }
        Ok(())
    }

    fn field<T: std::str::FromStr>(&self, line: u64, row: &[String], idx: usize, name: &str) -> CliResult<T> {
        let raw = row.get(idx).ok_or_else(|| self.err(line, format!("missing column {name}")))?;
        raw.parse().map_err(|_| self.err(line, format!("cannot parse {name} from {raw:?}")))
    }

    pub fn is_empirical(&self) -> bool {
        self.header.first().map(String::as_str) == Some("value") && self.header.get(1).map(String::as_str) == Some("count")
    }

    pub fn to_empirical(&self) -> CliResult<EmpiricalDistribution> {
        self.expect_header(&EMPIRICAL_HEADER[..2])?;
        let mut support = Vec::with_capacity(self.rows.len());
        let mut weights = Vec::with_capacity(self.rows.len());
        for (line, row) in &self.rows {
            let x: f64 = self.field(*line, row, 0, "value")?;
            let w: u64 = self.field(*line, row, 1, "count")?;
            if let Some(&prev) = support.last() {
                if !(prev < x) {
                    return Err(self.err(*line, "values must be strictly increasing"));
                }
            }
            if w == 0 {
                return Err(self.err(*line, "count must be positive"));
            }
            support.push(x);
            weights.push(w);
        }
        if support.is_empty() {
            return Err(self.err(0, "no data rows"));
        }
        Ok(EmpiricalDistribution::from_parts(support, weights)?)
    }

    pub fn to_tabulated(&self) -> CliResult<TabulatedCdf> {
        self.expect_header(&REFERENCE_HEADER)?;
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(self.rows.len());
        for (line, row) in &self.rows {
            let x: f64 = self.field(*line, row, 0, "value")?;
            let f: f64 = self.field(*line, row, 1, "cdf")?;
            if !(0.0..=1.0).contains(&f) {
                return Err(self.err(*line, format!("cdf value {f} outside [0, 1]")));
            }
            if let Some(&(px, pf)) = points.last() {
                if !(px < x) || f < pf {
                    return Err(self.err(*line, "values must increase and the CDF must not decrease"));
                }
            }
            points.push((x, f));
        }
        if points.is_empty() {
            return Err(self.err(0, "no data rows"));
        }
        let continuous = self.meta.get("kind").map(String::as_str) == Some("continuous");
        Ok(TabulatedCdf { points, continuous })
    }
}

/// A reference CDF known at grid points: a right-continuous step function
/// (`kind=lattice`) or a piecewise-linear one (`kind=continuous`).
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    points: Vec<(f64, f64)>,
    continuous: bool,
}

impl ReferenceCdf for TabulatedCdf {
    fn cdf(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|&(px, _)| px <= x);
        if i == 0 {
            return if self.continuous { self.points[0].1 } else { 0.0 };
        }
        let (x0, f0) = self.points[i - 1];
        match (self.continuous, self.points.get(i)) {
            (true, Some(&(x1, f1))) => f0 + (f1 - f0) * (x - x0) / (x1 - x0),
            _ => f0,
        }
    }

    fn left_limit(&self, x: f64) -> f64 {
        if self.continuous {
            return self.cdf(x);
        }
        let i = self.points.partition_point(|&(px, _)| px < x);
        if i == 0 {
            0.0
        } else {
            self.points[i - 1].1
        }
    }

    fn atoms_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.continuous {
            return Vec::new();
        }
        self.points.iter().map(|&(x, _)| x).filter(|&x| lo <= x && x <= hi).collect()
    }
}

/// Everything needed to rerun an experiment, plus what it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub tool_version: String,
    pub rng_scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    /// `[m(N)]` for longest-run runs, `alpha P(A_1)` for hitting-time runs.
    pub normalization: f64,
    pub reference: String,
    pub sup_distance: f64,
    pub excluded_repetitions: u64,
    pub wall_time_secs: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_file(path, self.to_json().as_bytes())
    }
}

/// A config file holds either a bare [`ExperimentConfig`] or a manifest.
pub fn read_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parse_err = |e: serde_json::Error| CliError::Parse { path: path.to_path_buf(), line: e.line() as u64, message: e.to_string() };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    let config = if value.get("config").is_some() {
        RunManifest::from_json(&text).map_err(parse_err)?.config
    } else {
        serde_json::from_value(value).map_err(parse_err)?
    };
    Ok(config)
}
