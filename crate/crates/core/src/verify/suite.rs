use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_channel_normalization, check_continuity_bounds, check_enorm_duality, check_enorm_properties, check_escaling,
    check_gkls_bounds, check_inequality_suite, check_semigroup_laws, check_series_convergence, check_sqrt_g_values,
    check_taylor_rates, check_threshold_sweep, CheckResult, Dynamics, SweepResult,
};
use crate::error::{invalid, Result};
use crate::linalg::CMat;
use crate::operators::{DiscreteOperator, Family};
use crate::random::{derive_seed, rng};
use crate::semigroups::{qubit_flip, random_gkls};
use crate::superop::EcdOptions;

/// Parameters of the default verification suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub restarts: usize,

    pub duality_samples: usize,
    pub duality_max_dim: usize,
    pub duality_energies: Vec<f64>,

    pub sqrt_g_dim: usize,
    pub sqrt_g_energies: Vec<f64>,

    pub property_dim: usize,
    pub property_operators: usize,
    pub property_energies: Vec<f64>,

    pub channel_count: usize,
    pub channel_dim: usize,
    pub channel_energies: Vec<f64>,

    pub laws_dim: usize,

    pub bound_dim: usize,
    pub bound_energies: Vec<f64>,
    pub bound_times: Vec<f64>,
    pub gkls_dim: usize,

    pub taylor_dim: usize,
    pub taylor_energy: f64,
    pub taylor_k_max: usize,
    pub taylor_times: Vec<f64>,

    pub series_dim: usize,
    pub series_energy: f64,
    pub series_time: f64,
    pub series_n_max: usize,
    pub series_target: f64,
    pub hypothesis_n_max: usize,

    pub threshold_alphas: Vec<f64>,
    pub threshold_dims: Vec<usize>,
    pub threshold_energies: Vec<f64>,

    pub inequality_dims: Vec<usize>,
    pub inequality_energy: f64,
    pub inequality_samples: usize,

    pub escaling_dim: usize,
    pub escaling_energies: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 16,
            duality_samples: 200,
            duality_max_dim: 16,
            duality_energies: vec![0.5, 1.0, 4.0],
            sqrt_g_dim: 64,
            sqrt_g_energies: vec![1.0, 2.0, 4.0, 7.5],
            property_dim: 32,
            property_operators: 20,
            property_energies: (0..20).map(|i| 0.1 * 250f64.powf(i as f64 / 19.0)).collect(),
            channel_count: 20,
            channel_dim: 3,
            channel_energies: vec![0.5, 2.0],
            laws_dim: 6,
            bound_dim: 32,
            bound_energies: vec![1.0, 4.0],
            bound_times: vec![0.01, 0.1, 0.5],
            gkls_dim: 3,
            taylor_dim: 16,
            taylor_energy: 2.0,
            taylor_k_max: 3,
            taylor_times: (0..7).map(|i| 1e-3 * 10f64.powf(i as f64 / 3.0)).collect(),
            series_dim: 32,
            series_energy: 4.0,
            series_time: 1.0,
            series_n_max: 20,
            series_target: 1e-6,
            hypothesis_n_max: 10,
            threshold_alphas: vec![0.25, 0.5, 0.75],
            threshold_dims: vec![16, 32, 64, 128],
            threshold_energies: vec![1.0, 4.0, 16.0],
            inequality_dims: vec![2, 3],
            inequality_energy: 1.0,
            inequality_samples: 500,
            escaling_dim: 32,
            escaling_energies: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let grids: [(&str, &[f64]); 8] = [
            ("duality_energies", &self.duality_energies),
            ("sqrt_g_energies", &self.sqrt_g_energies),
            ("property_energies", &self.property_energies),
            ("channel_energies", &self.channel_energies),
            ("bound_energies", &self.bound_energies),
            ("bound_times", &self.bound_times),
            ("taylor_times", &self.taylor_times),
            ("escaling_energies", &self.escaling_energies),
        ];
        for (name, grid) in grids {
            if grid.is_empty() {
                return invalid(format!("{name} is empty"));
            }
            if grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return invalid(format!("{name} must contain positive finite values"));
            }
        }
        if self.threshold_alphas.is_empty() || self.threshold_dims.len() < 2 || self.threshold_energies.is_empty() {
            return invalid("threshold sweep needs alphas, at least two dims and energies");
        }
        if self.inequality_dims.is_empty() {
            return invalid("inequality_dims is empty");
        }
        if self.restarts == 0 {
            return invalid("restarts must be positive");
        }
        for (name, x) in [
            ("taylor_energy", self.taylor_energy),
            ("series_energy", self.series_energy),
            ("inequality_energy", self.inequality_energy),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return invalid(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub sweeps: Vec<SweepResult>,
    pub runtime_ms: u64,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.is_hard_failure())
    }

    pub fn passed(&self) -> bool {
        self.hard_failures().next().is_none()
    }
}

type Output = (Vec<CheckResult>, Vec<SweepResult>);
type Task<'a> = Box<dyn Fn(EcdOptions) -> Result<Output> + Send + Sync + 'a>;

fn family_op(g: &DiscreteOperator, f: Family) -> Result<CMat> {
    Ok(g.family(f)?.into_matrix())
}

const BOUND_FAMILIES: [(&str, Family); 3] = [
    ("sqrt_g", Family::Power { alpha: 0.5 }),
    ("g_quarter", Family::Power { alpha: 0.25 }),
    ("sqrt_log", Family::SqrtLog),
];

/// Runs every check of the suite. Tasks run in parallel; each gets an ECD
/// seed derived from the suite seed and its position, so the report does not
/// depend on scheduling.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let mut tasks: Vec<Task<'_>> = Vec::new();

    tasks.push(Box::new(|_| {
        let c = check_enorm_duality(cfg.duality_samples, cfg.duality_max_dim, &cfg.duality_energies, cfg.seed)?;
        Ok((vec![c], vec![]))
    }));
    tasks.push(Box::new(|_| Ok((vec![check_sqrt_g_values(cfg.sqrt_g_dim, &cfg.sqrt_g_energies)?], vec![]))));
    tasks.push(Box::new(|o| {
        let g = DiscreteOperator::number(cfg.property_dim)?;
        Ok((check_enorm_properties(&g, &cfg.property_energies, cfg.property_operators, o.seed)?, vec![]))
    }));
    tasks.push(Box::new(|o| {
        let c = check_channel_normalization(cfg.channel_count, cfg.channel_dim, &cfg.channel_energies, o.seed, &o)?;
        Ok((vec![c], vec![]))
    }));
    tasks.push(Box::new(|o| Ok((check_semigroup_laws(cfg.laws_dim, o.seed)?, vec![]))));

    for dynamics in [Dynamics::Unitary, Dynamics::Gaussian] {
        for (label, fam) in BOUND_FAMILIES {
            for &e in &cfg.bound_energies {
                tasks.push(Box::new(move |o| {
                    let g = DiscreteOperator::number(cfg.bound_dim)?;
                    let a = family_op(&g, fam)?;
                    let (c, s) = check_continuity_bounds(dynamics, &a, label, &g, e, &cfg.bound_times, &o)?;
                    Ok((c, vec![s]))
                }));
            }
        }
    }
    tasks.push(Box::new(|o| {
        let g = DiscreteOperator::number(2)?;
        let (v, k) = qubit_flip(1.0);
        Ok((check_gkls_bounds("qubit_flip", &v, &k, &g, 1.0, &[0.01, 0.1], &o)?, vec![]))
    }));
    for &e in &cfg.bound_energies {
        tasks.push(Box::new(move |o| {
            let g = DiscreteOperator::number(cfg.gkls_dim)?;
            let (v, k) = random_gkls(&mut rng(o.seed), cfg.gkls_dim, 2, 1.0);
            Ok((check_gkls_bounds("random", &v, &k, &g, e, &cfg.bound_times, &o)?, vec![]))
        }));
    }

    for dynamics in [Dynamics::Unitary, Dynamics::Gaussian] {
        tasks.push(Box::new(move |o| {
            let g = DiscreteOperator::number(cfg.taylor_dim)?;
            let a = family_op(&g, Family::Power { alpha: 0.25 })?;
            check_taylor_rates(dynamics, &a, "g_quarter", &g, cfg.taylor_energy, cfg.taylor_k_max, &cfg.taylor_times, &o)
        }));
    }

    for (dynamics, label, fam) in [
        (Dynamics::Unitary, "sqrt_log", Family::SqrtLog),
        (Dynamics::Gaussian, "fourth_root_log", Family::LogPower { beta: 0.25 }),
    ] {
        tasks.push(Box::new(move |o| {
            let g = DiscreteOperator::number(cfg.series_dim)?;
            let a = family_op(&g, fam)?;
            check_series_convergence(
                dynamics,
                &a,
                label,
                &g,
                cfg.series_energy,
                cfg.series_time,
                cfg.series_n_max,
                cfg.series_target,
                cfg.hypothesis_n_max,
                &o,
            )
        }));
    }

    for (dynamics, scale) in [(Dynamics::Unitary, 1.0), (Dynamics::Gaussian, 0.5)] {
        tasks.push(Box::new(move |_| {
            let alphas: Vec<f64> = cfg.threshold_alphas.iter().map(|a| a * scale).collect();
            check_threshold_sweep(dynamics, &alphas, &cfg.threshold_dims, &cfg.threshold_energies)
        }));
    }

    for &d in &cfg.inequality_dims {
        tasks.push(Box::new(move |o| {
            let g = DiscreteOperator::number(d)?;
            let checks = check_inequality_suite(&g, cfg.inequality_energy, o.seed, cfg.inequality_samples, &o)?;
            let checks = checks
                .into_iter()
                .map(|mut c| {
                    c.check_id = format!("inequality/d={d}/{}", c.check_id);
                    c
                })
                .collect();
            Ok((checks, vec![]))
        }));
    }

    for (label, fam) in &BOUND_FAMILIES[..2] {
        tasks.push(Box::new(move |o| {
            let g = DiscreteOperator::number(cfg.escaling_dim)?;
            let a = family_op(&g, *fam)?;
            let (c, s) = check_escaling(Dynamics::Unitary, &a, label, &g, &cfg.escaling_energies, &o)?;
            Ok((c, vec![s]))
        }));
    }

    let base = EcdOptions { restarts: cfg.restarts, ..EcdOptions::default() };
    let outputs: Vec<Result<Output>> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, task)| task(EcdOptions { seed: derive_seed(cfg.seed, i as u64), ..base }))
        .collect();
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for out in outputs {
        let (c, s) = out?;
        checks.extend(c);
        sweeps.extend(s);
    }
    Ok(SuiteReport { checks, sweeps, runtime_ms: started.elapsed().as_millis() as u64 })
}
