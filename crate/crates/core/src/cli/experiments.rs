use rayon::prelude::*;
use serde_json::json;

use super::config::{DynamicsKind, Experiment, ExperimentConfig, GklsSpec};
use super::{import_matrix, CliError};
use crate::enorm::enorm;
use crate::error::Error;
use crate::linalg::CMat;
use crate::operators::DiscreteOperator;
use crate::random::{derive_seed, rng};
use crate::semigroups::{qubit_flip, random_gkls, SemigroupSpec};
use crate::superop::ecd::{ecd_lower, extended_trace_norm};
use crate::superop::{EcdOptions, Superoperator};
use crate::verify::{
    check_continuity_bounds, check_gkls_bounds, check_series_convergence, check_taylor_rates, check_threshold_sweep,
    run_suite, Axis, CheckBuilder, CheckResult, Dynamics, SweepPoint, SweepResult, Worst,
};

type Output = (Vec<CheckResult>, Vec<SweepResult>);

pub(super) fn dispatch(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    match cfg.experiment {
        Experiment::Enorm => run_enorm(cfg),
        Experiment::Ecd => run_ecd(cfg),
        Experiment::Semigroup => run_semigroup(cfg),
        Experiment::VerifySuite => {
            let suite = cfg.suite.clone().expect("filled in when parsing");
            let report = run_suite(&suite)?;
            Ok((report.checks, report.sweeps))
        }
        Experiment::ThresholdSweep => {
            let d = dynamics(cfg);
            Ok(check_threshold_sweep(d, &cfg.alphas, &cfg.dims, &cfg.energies)?)
        }
        Experiment::Series => run_series(cfg),
    }
}

fn opts(cfg: &ExperimentConfig, i: usize) -> EcdOptions {
    EcdOptions {
        seed: derive_seed(cfg.seed, i as u64),
        restarts: cfg.restarts,
        ..EcdOptions::default()
    }
}

/// Unitary or Gaussian; validation rules out the rest where this is called.
fn dynamics(cfg: &ExperimentConfig) -> Dynamics {
    match cfg.dynamics {
        Some(DynamicsKind::Gaussian) => Dynamics::Gaussian,
        _ => Dynamics::Unitary,
    }
}

fn operator(cfg: &ExperimentConfig, g: &DiscreteOperator) -> Result<(CMat, String), CliError> {
    let spec = cfg.operator.as_ref().ok_or_else(|| CliError::Config("operator is required".into()))?;
    let m = match spec.family()? {
        Some(f) => g.family(f)?.into_matrix(),
        None => import_matrix(spec.matrix.as_ref().expect("family() checked"))?,
    };
    if m.nrows() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: m.nrows() }.into());
    }
    Ok((m, spec.label()))
}

fn gkls_ops(cfg: &ExperimentConfig, g: &DiscreteOperator) -> Result<(Vec<CMat>, CMat, &'static str), CliError> {
    match cfg.gkls.as_ref().ok_or_else(|| CliError::Config("gkls is required".into()))? {
        GklsSpec::Random { operators, rate } => {
            let (v, k) = random_gkls(&mut rng(cfg.seed), g.dim(), *operators, *rate);
            Ok((v, k, "random"))
        }
        GklsSpec::QubitFlip { gamma } => {
            if g.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: g.dim() }.into());
            }
            let (v, k) = qubit_flip(*gamma);
            Ok((v, k, "qubit_flip"))
        }
    }
}

fn run_enorm(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.g.build()?;
    let (a, label) = operator(cfg, &g)?;
    let results: Vec<_> = cfg.energies.par_iter().map(|&e| enorm(&a, &g, e)).collect::<Result<_, _>>()?;
    let b = CheckBuilder::new(format!("enorm/{label}/duality"), "dual − primal ≤ 1e-7 (1 + primal)")
        .param("operator", label.as_str())
        .param("dim", g.dim())
        .param("energies", json!(cfg.energies))
        .param("seed", cfg.seed);
    let mut w = Worst::new();
    let mut points = Vec::new();
    for (r, &e) in results.iter().zip(&cfg.energies) {
        w.push(r.gap.abs() / (1.0 + r.primal_value.abs()), 1e-7, 0.0);
        points.push(SweepPoint { axis: e, value: r.value, margin: None });
    }
    let sweep = SweepResult::new(format!("enorm/{label}"), Axis::Energy, points, false);
    Ok((vec![w.finish(b, 0.0, false)], vec![sweep]))
}

fn run_ecd(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.g.build()?;
    let d = g.dim();
    let maps: Vec<(String, Superoperator)> = match &cfg.choi {
        Some(path) => {
            let j = import_matrix(path)?;
            let n = j.nrows();
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(CliError::Config(format!("{}: Choi matrix size {n} is not a square", path.display())));
            }
            if side != d {
                return Err(Error::DimensionMismatch { expected: d, found: side }.into());
            }
            vec![("choi".into(), Superoperator::from_choi(j, d, d)?)]
        }
        None => {
            let (spec, label) = semigroup(cfg, &g)?;
            let id = Superoperator::identity(d);
            cfg.times
                .iter()
                .map(|&t| Ok((format!("{label}/t={t}"), spec.channel_at(t)?.sub(&id)?)))
                .collect::<Result<_, Error>>()?
        }
    };
    let ne = cfg.energies.len();
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for (i, (label, phi)) in maps.iter().enumerate() {
        let ests = cfg
            .energies
            .iter()
            .enumerate()
            .map(|(j, &e)| ecd_lower(phi, &g, e, &opts(cfg, i * ne + j)))
            .collect::<Result<Vec<_>, _>>()?;
        let base = |suffix: &str, claim: &str| {
            CheckBuilder::new(format!("ecd/{label}/{suffix}"), claim)
                .param("dim", d)
                .param("energies", json!(cfg.energies))
                .param("seed", cfg.seed)
                .param("restarts", cfg.restarts)
        };
        let mut energy = Worst::new();
        let mut value = Worst::new();
        let mut points = Vec::new();
        for (est, &e) in ests.iter().zip(&cfg.energies) {
            energy.push(est.witness_energy(&g), e, 1e-9);
            let rho = &est.witness * est.witness.adjoint();
            let direct = extended_trace_norm(phi, &rho, d)?;
            value.push((direct - est.value).abs() / (1.0 + est.value), 0.0, 1e-9);
            points.push(SweepPoint { axis: e, value: est.value, margin: None });
        }
        checks.push(energy.finish(base("witness_energy", "Tr(ρ_A G) ≤ E at the witness"), 1e-9, false));
        checks.push(value.finish(base("witness_value", "witness attains the reported value, relative to 1 + value"), 1e-9, false));
        sweeps.push(SweepResult::new(format!("ecd/{label}"), Axis::Energy, points, false));
    }
    Ok((checks, sweeps))
}

fn semigroup(cfg: &ExperimentConfig, g: &DiscreteOperator) -> Result<(SemigroupSpec, String), CliError> {
    match cfg.dynamics {
        Some(DynamicsKind::Gkls) => {
            let (v, k, label) = gkls_ops(cfg, g)?;
            Ok((SemigroupSpec::gkls(v, k)?, format!("gkls/{label}")))
        }
        Some(DynamicsKind::Gaussian) => {
            let (a, label) = operator(cfg, g)?;
            Ok((SemigroupSpec::gaussian(a)?, format!("gaussian/{label}")))
        }
        _ => {
            let (a, label) = operator(cfg, g)?;
            Ok((SemigroupSpec::unitary(a)?, format!("unitary/{label}")))
        }
    }
}

fn run_semigroup(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.g.build()?;
    let per_energy: Vec<Result<Output, Error>> = if cfg.dynamics == Some(DynamicsKind::Gkls) {
        let (v, k, label) = gkls_ops(cfg, &g)?;
        SemigroupSpec::gkls(v.clone(), k.clone())?;
        cfg.energies
            .par_iter()
            .enumerate()
            .map(|(i, &e)| Ok((check_gkls_bounds(label, &v, &k, &g, e, &cfg.times, &opts(cfg, i))?, vec![])))
            .collect()
    } else {
        let dyn_ = dynamics(cfg);
        let (a, label) = operator(cfg, &g)?;
        SemigroupSpec::unitary(a.clone())?;
        cfg.energies
            .par_iter()
            .enumerate()
            .map(|(i, &e)| {
                let o = opts(cfg, i);
                let (mut checks, sweep) = check_continuity_bounds(dyn_, &a, &label, &g, e, &cfg.times, &o)?;
                let mut sweeps = vec![sweep];
                if let Some(k) = cfg.k_max {
                    let (c, s) = check_taylor_rates(dyn_, &a, &label, &g, e, k, &cfg.times, &o)?;
                    checks.extend(c);
                    sweeps.extend(s);
                }
                Ok((checks, sweeps))
            })
            .collect()
    };
    let mut out: Output = (vec![], vec![]);
    for r in per_energy {
        let (c, s) = r?;
        out.0.extend(c);
        out.1.extend(s);
    }
    Ok(out)
}

fn run_series(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.g.build()?;
    let (a, label) = operator(cfg, &g)?;
    let pairs: Vec<(f64, f64)> = cfg.energies.iter().flat_map(|&e| cfg.times.iter().map(move |&t| (e, t))).collect();
    let results: Vec<Result<Output, Error>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(e, t))| {
            check_series_convergence(
                dynamics(cfg),
                &a,
                &label,
                &g,
                e,
                t,
                cfg.n_max.unwrap_or(20),
                cfg.target.unwrap_or(1e-6),
                cfg.hypothesis_n_max.unwrap_or(10),
                &opts(cfg, i),
            )
        })
        .collect();
    let mut out: Output = (vec![], vec![]);
    for r in results {
        let (c, s) = r?;
        out.0.extend(c);
        out.1.extend(s);
    }
    Ok(out)
}
