//! Numerical checks of norm bounds, rates and thresholds for quantum
//! dynamical semigroups on truncated spaces.
//!
//! Each check compares a left-hand side against a right-hand side and records
//! the margin `rhs − lhs`. Hard checks compare a certified lower bound (or an
//! exact value) against an exact upper bound, so a failure is conclusive.
//! Checks whose right-hand side is itself an estimate are marked advisory.

mod bounds;
mod inequalities;
mod laws;
mod suite;
mod threshold;

pub use bounds::{
    analytic_tail, check_continuity_bounds, check_escaling, check_gkls_bounds, check_series_convergence,
    check_taylor_rates,
};
pub use inequalities::{check_enorm_properties, check_inequality_suite, random_feasible_operator};
pub use laws::{check_channel_normalization, check_enorm_duality, check_semigroup_laws, check_sqrt_g_values};
pub use suite::{run_suite, SuiteConfig, SuiteReport};
pub use threshold::check_threshold_sweep;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Which of the two operator-driven dynamics a check concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    /// `ρ ↦ e^{-iAt} ρ e^{iAt}`.
    Unitary,
    /// Gaussian average of the unitary group.
    Gaussian,
}

impl Dynamics {
    pub fn name(&self) -> &'static str {
        match self {
            Dynamics::Unitary => "unitary",
            Dynamics::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub claim_ref: String,
    /// Includes `tolerance`, and the seed and dimensions used.
    pub parameters: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
    pub advisory: bool,
    pub runtime_ms: u64,
}

impl CheckResult {
    pub fn tolerance(&self) -> f64 {
        self.parameters.get("tolerance").and_then(Value::as_f64).unwrap_or(0.0)
    }

    /// Failed and not advisory.
    pub fn is_hard_failure(&self) -> bool {
        !self.passed && !self.advisory
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Dimension,
    Energy,
    Time,
    Order,
    SeriesLength,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Dimension => "dimension",
            Axis::Energy => "energy",
            Axis::Time => "time",
            Axis::Order => "order",
            Axis::SeriesLength => "series_length",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: f64,
    pub value: f64,
    /// Distance to the bound at this point, when there is one.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub sweep_id: String,
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
    /// Least-squares log-log slope, for rate sweeps with at least 5 points.
    pub fitted_slope: Option<f64>,
    pub log_log: bool,
}

impl SweepResult {
    pub fn new(sweep_id: impl Into<String>, axis: Axis, mut points: Vec<SweepPoint>, log_log: bool) -> Self {
        points.sort_by(|a, b| a.axis.total_cmp(&b.axis));
        let fitted_slope = if log_log {
            let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.axis, p.value)).collect();
            fit_loglog_slope(&xy)
        } else {
            None
        };
        Self {
            sweep_id: sweep_id.into(),
            axis,
            points,
            fitted_slope,
            log_log,
        }
    }
}

/// Values below this are treated as rounding noise by the rate fit.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Least-squares slope of `log y` against `log x`.
///
/// Points are sorted by `x`; the two smallest-`x` points are dropped when
/// their `y` lies below [`NOISE_FLOOR`]. Needs at least 5 points, all
/// positive, after that.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let noisy = pts.iter().take(2).any(|p| p.1 < NOISE_FLOOR);
    if noisy {
        pts.drain(..pts.len().min(2));
    }
    if pts.len() < 5 || pts.iter().any(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return None;
    }
    let n = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Collects parameters and timing for one [`CheckResult`].
pub(crate) struct CheckBuilder {
    check_id: String,
    claim_ref: String,
    parameters: BTreeMap<String, Value>,
    started: Instant,
}

impl CheckBuilder {
    pub(crate) fn new(check_id: impl Into<String>, claim_ref: impl Into<String>) -> Self {
        Self {
            check_id: check_id.into(),
            claim_ref: claim_ref.into(),
            parameters: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub(crate) fn finish(self, lhs: f64, rhs: f64, tolerance: f64) -> CheckResult {
        self.build(lhs, rhs, tolerance, false)
    }

    pub(crate) fn finish_advisory(self, lhs: f64, rhs: f64, tolerance: f64) -> CheckResult {
        self.build(lhs, rhs, tolerance, true)
    }

    fn build(mut self, lhs: f64, rhs: f64, tolerance: f64, advisory: bool) -> CheckResult {
        self.parameters.insert("tolerance".into(), tolerance.into());
        let margin = rhs - lhs;
        CheckResult {
            check_id: self.check_id,
            claim_ref: self.claim_ref,
            parameters: self.parameters,
            lhs,
            rhs,
            margin,
            passed: margin.is_finite() && margin >= -tolerance,
            advisory,
            runtime_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

/// The sample with the smallest margin, as `(lhs, rhs)`, plus the violation count.
pub(crate) struct Worst {
    lhs: f64,
    rhs: f64,
    margin: f64,
    violations: usize,
    samples: usize,
}

impl Worst {
    pub(crate) fn new() -> Self {
        Self {
            lhs: 0.0,
            rhs: 0.0,
            margin: f64::INFINITY,
            violations: 0,
            samples: 0,
        }
    }

    pub(crate) fn push(&mut self, lhs: f64, rhs: f64, tolerance: f64) {
        let m = rhs - lhs;
        self.samples += 1;
        if !(m >= -tolerance) {
            self.violations += 1;
        }
        if !(m >= self.margin) {
            self.lhs = lhs;
            self.rhs = rhs;
            self.margin = m;
        }
    }

    pub(crate) fn finish(self, b: CheckBuilder, tolerance: f64, advisory: bool) -> CheckResult {
        let b = b.param("samples", self.samples).param("violations", self.violations);
        if advisory {
            b.finish_advisory(self.lhs, self.rhs, tolerance)
        } else {
            b.finish(self.lhs, self.rhs, tolerance)
        }
    }
}
