//! Report files: `report.json`, one CSV per sweep and optional SVG plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Experiment, ExperimentConfig};
use super::svg::line_plot;
use super::CliError;
use crate::verify::{CheckResult, SweepResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: Experiment,
    /// The configuration after overrides.
    pub config: serde_json::Value,
    pub passed: bool,
    pub hard_failures: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub sweeps: Vec<SweepResult>,
    pub runtime_ms: u64,
}

impl Report {
    pub fn new(cfg: &ExperimentConfig, checks: Vec<CheckResult>, sweeps: Vec<SweepResult>, runtime_ms: u64) -> Self {
        let hard_failures: Vec<String> =
            checks.iter().filter(|c| c.is_hard_failure()).map(|c| c.check_id.clone()).collect();
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: cfg.experiment,
            config: serde_json::to_value(cfg).expect("config serializes"),
            passed: hard_failures.is_empty(),
            hard_failures,
            checks,
            sweeps,
            runtime_ms,
        }
    }
}

/// File name for a sweep id: `/` becomes `__`, other unusual characters `_`.
pub fn file_stem(id: &str) -> String {
    id.replace('/', "__")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' })
        .collect()
}

pub fn sweep_csv(s: &SweepResult) -> String {
    let mut out = String::from("axis,value,margin\n");
    for p in &s.points {
        match p.margin {
            Some(m) => writeln!(out, "{},{},{}", p.axis, p.value, m),
            None => writeln!(out, "{},{},", p.axis, p.value),
        }
        .expect("writing to a String");
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(&path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

fn mkdir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes everything under `dir` and returns the paths, report first.
pub fn write_report(report: &Report, dir: &Path, plots: bool) -> Result<Vec<PathBuf>, CliError> {
    mkdir(dir)?;
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    let mut written = vec![write(dir.join("report.json"), &json)?];
    if report.sweeps.is_empty() {
        return Ok(written);
    }
    let sweeps = dir.join("sweeps");
    mkdir(&sweeps)?;
    let plot_dir = dir.join("plots");
    if plots {
        mkdir(&plot_dir)?;
    }
    for s in &report.sweeps {
        let stem = file_stem(&s.sweep_id);
        written.push(write(sweeps.join(format!("{stem}.csv")), &sweep_csv(s))?);
        if plots {
            written.push(write(plot_dir.join(format!("{stem}.svg")), &line_plot(s))?);
        }
    }
    Ok(written)
}

/// Replaces every `runtime_ms` field with 0, for comparing reports.
pub fn strip_runtimes(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                if k == "runtime_ms" {
                    *x = serde_json::Value::from(0);
                } else {
                    strip_runtimes(x);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_runtimes),
        _ => {}
    }
}
