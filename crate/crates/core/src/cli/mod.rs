//! Command-line front end: experiment configs in, reports out.
//!
//! Exit codes: 0 when no hard check failed, 1 on a hard failure, 2 on a
//! configuration or input error (including unreadable matrix files and
//! dimension mismatches). `ECDNORM_THREADS` caps the worker pool.

pub mod config;
mod experiments;
pub mod matrix_io;
pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

pub use config::{Experiment, ExperimentConfig};
pub use matrix_io::{export_matrix, import_matrix, MatrixIoError};
pub use report::{write_report, Report, SCHEMA_VERSION};

pub const THREADS_ENV: &str = "ECDNORM_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Matrix(#[from] MatrixIoError),
    #[error(transparent)]
    Numerical(#[from] crate::error::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Passed = 0,
    HardFailure = 1,
    ConfigError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Where the configuration comes from.
#[derive(Debug, Clone)]
pub enum Source {
    /// A TOML file; relative matrix paths resolve against its directory.
    File(PathBuf),
    /// The built-in template of an experiment, optionally replaced by a file
    /// that must declare the same experiment.
    Template(Experiment, Option<PathBuf>),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub overrides: Vec<String>,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: Option<Report>,
    pub files: Vec<PathBuf>,
    pub error: Option<CliError>,
}

/// Loads, overrides and validates a configuration.
pub fn load_config(source: &Source, opts: &RunOptions) -> Result<ExperimentConfig, CliError> {
    let read = |p: &Path| -> Result<ExperimentConfig, CliError> {
        let text =
            std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
            other => other,
        })?;
        cfg.resolve_paths(p.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    };
    let base = match source {
        Source::File(p) => read(p)?,
        Source::Template(exp, None) => ExperimentConfig::template(*exp),
        Source::Template(exp, Some(p)) => {
            let cfg = read(p)?;
            if cfg.experiment != *exp {
                return Err(CliError::Config(format!(
                    "{} declares experiment {:?}, expected {:?}",
                    p.display(),
                    cfg.experiment.name(),
                    exp.name()
                )));
            }
            cfg
        }
    };
    let mut overrides = Vec::new();
    if let Some(s) = opts.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(d) = &opts.out_dir {
        overrides.push(format!("output.dir={}", toml::Value::String(d.display().to_string())));
    }
    overrides.extend(opts.overrides.iter().cloned());
    let cfg = base.with_overrides(&overrides)?;
    cfg.validate()?;
    Ok(cfg)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs an already validated configuration and writes its report.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Report, Vec<PathBuf>), CliError> {
    let started = Instant::now();
    let work = || experiments::dispatch(cfg);
    let (checks, sweeps) = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build a pool of {n} threads: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let report = Report::new(cfg, checks, sweeps, started.elapsed().as_millis() as u64);
    let files = write_report(&report, &cfg.output.dir, cfg.output.plots)?;
    Ok((report, files))
}

pub fn run(source: &Source, opts: &RunOptions) -> Outcome {
    let result = load_config(source, opts).and_then(|cfg| execute(&cfg));
    match result {
        Ok((report, files)) => Outcome {
            status: if report.passed { ExitStatus::Passed } else { ExitStatus::HardFailure },
            report: Some(report),
            files,
            error: None,
        },
        Err(e) => Outcome {
            status: ExitStatus::ConfigError,
            report: None,
            files: vec![],
            error: Some(e),
        },
    }
}
