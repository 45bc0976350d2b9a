use serde_json::json;

use super::{Axis, CheckBuilder, CheckResult, Dynamics, SweepPoint, SweepResult, Worst};
use crate::enorm::{enorm, family_norm};
use crate::error::{invalid, Result};
use crate::linalg::{CMat, MatrixOperator};
use crate::operators::DiscreteOperator;
use crate::semigroups::{
    commutator_generator, exp_semigroup_at, gaussian_channel_at, gaussian_generator, gkls_generator,
    taylor_polynomial, unitary_channel_at, GaussianMethod,
};
use crate::superop::{ecd_lower, EcdOptions, Superoperator};

/// Relative slack for comparing a lower-bound estimate with an exact bound.
const BOUND_RTOL: f64 = 1e-9;

fn bound_tol(rhs: f64) -> f64 {
    BOUND_RTOL * (1.0 + rhs.abs())
}

fn generator(dynamics: Dynamics, a: &CMat) -> Result<Superoperator> {
    match dynamics {
        Dynamics::Unitary => commutator_generator(a),
        Dynamics::Gaussian => gaussian_generator(a),
    }
}

fn channel(dynamics: Dynamics, a: &CMat, t: f64) -> Result<Superoperator> {
    if t == 0.0 {
        return Ok(Superoperator::identity(a.nrows()));
    }
    match dynamics {
        Dynamics::Unitary => unitary_channel_at(a, t),
        Dynamics::Gaussian => gaussian_channel_at(a, t, GaussianMethod::ClosedForm),
    }
}

fn check_times(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return invalid("time grid is empty");
    }
    if t_grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return invalid("times must be nonnegative and finite");
    }
    Ok(())
}

fn pow(a: &CMat, n: usize) -> CMat {
    let mut p = CMat::identity(a.nrows(), a.ncols());
    for _ in 0..n {
        p = &p * a;
    }
    p
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

fn common(b: CheckBuilder, dynamics: Dynamics, label: &str, g: &DiscreteOperator, e: f64, opts: &EcdOptions) -> CheckBuilder {
    b.param("dynamics", dynamics.name())
        .param("operator", label)
        .param("dim", g.dim())
        .param("energy", e)
        .param("seed", opts.seed)
        .param("restarts", opts.restarts)
}

/// Distance of `Φ_t` from the identity against `2t‖A‖_E` (unitary) or
/// `t(‖A‖²_E + ‖A²‖_E)` (Gaussian), plus an advisory row against
/// `t‖S‖_{⋄,E}` with the generator norm estimated.
pub fn check_continuity_bounds(
    dynamics: Dynamics,
    a: &CMat,
    label: &str,
    g: &DiscreteOperator,
    e: f64,
    t_grid: &[f64],
    opts: &EcdOptions,
) -> Result<(Vec<CheckResult>, SweepResult)> {
    check_times(t_grid)?;
    let coeff = match dynamics {
        Dynamics::Unitary => 2.0 * enorm(a, g, e)?.value,
        Dynamics::Gaussian => enorm(a, g, e)?.value.powi(2) + enorm(&(a * a), g, e)?.value,
    };
    let s_est = ecd_lower(&generator(dynamics, a)?, g, e, opts)?;
    let s_upper = s_est.value + s_est.restart_spread();
    let id = Superoperator::identity(g.dim());
    let mut checks = Vec::new();
    let mut points = Vec::new();
    for &t in t_grid {
        let b = CheckBuilder::new(
            format!("continuity/{}/{label}/E={e}/t={t}", dynamics.name()),
            match dynamics {
                Dynamics::Unitary => "‖Λ_t − id‖_{⋄,E} ≤ 2t‖A‖_E",
                Dynamics::Gaussian => "‖Ξ_t − id‖_{⋄,E} ≤ t(‖A‖_E² + ‖A²‖_E)",
            },
        );
        let b = common(b, dynamics, label, g, e, opts).param("t", t);
        let lhs = ecd_lower(&channel(dynamics, a, t)?.sub(&id)?, g, e, opts)?.value;
        let rhs = t * coeff;
        points.push(SweepPoint { axis: t, value: lhs, margin: Some(rhs - lhs) });
        checks.push(b.finish(lhs, rhs, bound_tol(rhs)));

        let b = CheckBuilder::new(
            format!("continuity_generator/{}/{label}/E={e}/t={t}", dynamics.name()),
            "‖Φ_t − id‖_{⋄,E} ≤ t‖S‖_{⋄,E}",
        );
        let b = common(b, dynamics, label, g, e, opts)
            .param("t", t)
            .param("generator_estimate", s_est.value)
            .param("restart_spread", s_est.restart_spread());
        let rhs = t * s_upper;
        checks.push(b.finish_advisory(lhs, rhs, bound_tol(rhs)));
    }
    let sweep = SweepResult::new(
        format!("continuity/{}/{label}/E={e}", dynamics.name()),
        Axis::Time,
        points,
        false,
    );
    Ok((checks, sweep))
}

/// GKLS generator bounds: the chain `‖{V}‖_E + 2‖K‖_E ≤ 4‖K‖_E`, the
/// distance `‖e^{tS} − id‖_{⋄,E} ≤ t(‖{V}‖_E + 2‖K‖_E)`, and an advisory row
/// against the estimated generator norm. `‖{V}‖_E` is the family objective
/// `sup Σ Tr(V_k ρ V_k*)`.
pub fn check_gkls_bounds(
    label: &str,
    v: &[CMat],
    k: &CMat,
    g: &DiscreteOperator,
    e: f64,
    t_grid: &[f64],
    opts: &EcdOptions,
) -> Result<Vec<CheckResult>> {
    check_times(t_grid)?;
    let s = gkls_generator(v, k)?;
    let ops: Vec<MatrixOperator> = v.iter().cloned().map(MatrixOperator::new).collect::<Result<_>>()?;
    let fam = family_norm(&ops, g, e)?.value;
    let kn = enorm(k, g, e)?.value;
    let params = |b: CheckBuilder| {
        b.param("generator", label)
            .param("dim", g.dim())
            .param("jump_operators", v.len())
            .param("energy", e)
            .param("seed", opts.seed)
            .param("restarts", opts.restarts)
    };
    let mut checks = Vec::new();
    let chain = fam + 2.0 * kn;
    let b = params(CheckBuilder::new(
        format!("gkls_chain/{label}/E={e}"),
        "‖{V_k}‖_E + 2‖K‖_E ≤ 4‖K‖_E",
    ));
    checks.push(b.finish(chain, 4.0 * kn, bound_tol(4.0 * kn)));

    let s_est = ecd_lower(&s, g, e, opts)?;
    let s_upper = s_est.value + s_est.restart_spread();
    let id = Superoperator::identity(g.dim());
    for &t in t_grid {
        let lhs = ecd_lower(&exp_semigroup_at(&s, t)?.sub(&id)?, g, e, opts)?.value;
        let rhs = t * chain;
        let b = params(CheckBuilder::new(
            format!("gkls_continuity/{label}/E={e}/t={t}"),
            "‖e^{tS} − id‖_{⋄,E} ≤ t(‖{V_k}‖_E + 2‖K‖_E)",
        ))
        .param("t", t);
        checks.push(b.finish(lhs, rhs, bound_tol(rhs)));

        let b = params(CheckBuilder::new(
            format!("gkls_continuity_generator/{label}/E={e}/t={t}"),
            "‖e^{tS} − id‖_{⋄,E} ≤ t‖S‖_{⋄,E}",
        ))
        .param("t", t)
        .param("generator_estimate", s_est.value)
        .param("restart_spread", s_est.restart_spread());
        let rhs = t * s_upper;
        checks.push(b.finish_advisory(lhs, rhs, bound_tol(rhs)));
    }
    Ok(checks)
}

/// Taylor remainders `‖Φ_t − Σ_{j≤k} t^j S^j/j!‖_{⋄,E}` for `k = 1..=k_max`
/// against `2(2t)^k ‖A^k‖_E / k!` (unitary) or `2(2t)^k ‖A^{2k}‖_E / k!`
/// (Gaussian), and the log-log rate of each remainder.
pub fn check_taylor_rates(
    dynamics: Dynamics,
    a: &CMat,
    label: &str,
    g: &DiscreteOperator,
    e: f64,
    k_max: usize,
    t_grid: &[f64],
    opts: &EcdOptions,
) -> Result<(Vec<CheckResult>, Vec<SweepResult>)> {
    check_times(t_grid)?;
    if k_max == 0 || k_max > 4 {
        return invalid(format!("Taylor order must be in 1..=4, got {k_max}"));
    }
    let s = generator(dynamics, a)?;
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for k in 1..=k_max {
        let power = match dynamics {
            Dynamics::Unitary => k,
            Dynamics::Gaussian => 2 * k,
        };
        let norm_pow = enorm(&pow(a, power), g, e)?.value;
        let mut points = Vec::new();
        for &t in t_grid {
            let rem = channel(dynamics, a, t)?.sub(&taylor_polynomial(&s, t, k)?)?;
            let lhs = ecd_lower(&rem, g, e, opts)?.value;
            let rhs = 2.0 * (2.0 * t).powi(k as i32) * norm_pow / factorial(k);
            let b = CheckBuilder::new(
                format!("taylor/{}/{label}/E={e}/k={k}/t={t}", dynamics.name()),
                match dynamics {
                    Dynamics::Unitary => "‖Λ_t − Σ_{j≤k} t^j S^j/j!‖_{⋄,E} ≤ 2(2t)^k‖A^k‖_E/k!",
                    Dynamics::Gaussian => "‖Ξ_t − Σ_{j≤k} t^j Z^j/j!‖_{⋄,E} ≤ 2(2t)^k‖A^{2k}‖_E/k!",
                },
            );
            let b = common(b, dynamics, label, g, e, opts).param("k", k).param("t", t);
            points.push(SweepPoint { axis: t, value: lhs, margin: Some(rhs - lhs) });
            checks.push(b.finish(lhs, rhs, bound_tol(rhs)));
        }
        let sweep = SweepResult::new(
            format!("taylor/{}/{label}/E={e}/k={k}", dynamics.name()),
            Axis::Time,
            points,
            true,
        );
        let required = k as f64 + 0.9;
        let b = CheckBuilder::new(
            format!("taylor_rate/{}/{label}/E={e}/k={k}", dynamics.name()),
            "Taylor remainder of order k decays at least like t^{k+0.9}",
        );
        let b = common(b, dynamics, label, g, e, opts)
            .param("k", k)
            .param("t_min", t_grid.iter().cloned().fold(f64::INFINITY, f64::min))
            .param("t_max", t_grid.iter().cloned().fold(0.0, f64::max))
            .param("points", t_grid.len());
        // A missing fit (too few usable points) fails with slope 0.
        let slope = sweep.fitted_slope.unwrap_or(0.0);
        checks.push(b.param("fitted", sweep.fitted_slope.is_some()).finish(required, slope, 0.0));
        sweeps.push(sweep);
    }
    Ok((checks, sweeps))
}

/// `√E Σ_{j>n} (2t)^j / √(j!)`.
pub fn analytic_tail(e: f64, t: f64, n: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for j in 1..=n + 400 {
        term *= 2.0 * t / (j as f64).sqrt();
        if j > n {
            sum += term;
            if term <= 1e-20 * sum && j > n + 5 {
                break;
            }
        }
    }
    e.sqrt() * sum
}

/// Convergence of the exponential series of the generator.
///
/// Measures `r_n = ‖Φ_t − Σ_{j≤n} t^j S^j/j!‖_{⋄,E}` for `n = 0..=n_max`,
/// checks that `r_n` does not increase past its maximum, that `r_{n_max}` is
/// below `target` and below the tails `Σ_{j>n} (2t)^j ‖A^{p j}‖_E / j!` and
/// `√E Σ_{j>n} (2t)^j / √(j!)` (`p = 1` unitary, `2` Gaussian), and records
/// the growth hypothesis `‖A^{p n}‖_E ≤ √(n! E)` for `1 ≤ n ≤ hyp_n`.
#[allow(clippy::too_many_arguments)]
pub fn check_series_convergence(
    dynamics: Dynamics,
    a: &CMat,
    label: &str,
    g: &DiscreteOperator,
    e: f64,
    t: f64,
    n_max: usize,
    target: f64,
    hyp_n: usize,
    opts: &EcdOptions,
) -> Result<(Vec<CheckResult>, Vec<SweepResult>)> {
    check_times(&[t])?;
    let p = match dynamics {
        Dynamics::Unitary => 1,
        Dynamics::Gaussian => 2,
    };
    let s = generator(dynamics, a)?;
    let phi = channel(dynamics, a, t)?;
    let mut r = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let rem = phi.sub(&taylor_polynomial(&s, t, n)?)?;
        r.push(ecd_lower(&rem, g, e, opts)?.value);
    }
    let id = format!("series/{}/{label}/E={e}/t={t}", dynamics.name());
    let params = |b: CheckBuilder| common(b, dynamics, label, g, e, opts).param("t", t).param("n_max", n_max);
    let mut checks = Vec::new();

    let hump = r
        .iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > r[best] { i } else { best });
    let rise = r[hump..].windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let b = params(CheckBuilder::new(format!("{id}/monotone"), "r_n nonincreasing past its maximum"))
        .param("hump", hump);
    checks.push(b.finish(rise, 1e-8 * r[hump], 1e-12));

    let last = r[n_max];
    let b = params(CheckBuilder::new(format!("{id}/target"), "r_{n_max} below the target accuracy"));
    checks.push(b.finish(last, target, 0.0));

    let mut tail = 0.0;
    let mut c = 1.0;
    for j in 1..=n_max + 400 {
        c *= 2.0 * t / j as f64;
        if j > n_max {
            let term = c * enorm(&pow(a, p * j), g, e)?.value;
            tail += term;
            if !tail.is_finite() || (term <= 1e-20 * tail && j > n_max + 5) {
                break;
            }
        }
    }
    let b = params(CheckBuilder::new(
        format!("{id}/tail"),
        "r_n ≤ Σ_{j>n} (2t)^j ‖A^{pj}‖_E / j!",
    ));
    checks.push(b.finish(last, tail, bound_tol(tail)));

    let atail = analytic_tail(e, t, n_max);
    let b = params(CheckBuilder::new(
        format!("{id}/analytic_tail"),
        "r_n ≤ √E Σ_{j>n} (2t)^j / √(j!)",
    ));
    checks.push(b.finish(last, atail, bound_tol(atail)));

    let mut worst = Worst::new();
    let mut hyp_points = Vec::new();
    for n in 1..=hyp_n {
        let lhs = enorm(&pow(a, p * n), g, e)?.value;
        let rhs = (factorial(n) * e).sqrt();
        worst.push(lhs, rhs, 1e-8);
        hyp_points.push(SweepPoint { axis: n as f64, value: lhs / rhs, margin: Some(rhs - lhs) });
    }
    let b = common(
        CheckBuilder::new(format!("{id}/hypothesis"), "‖A^{pn}‖_E ≤ √(n! E)"),
        dynamics,
        label,
        g,
        e,
        opts,
    )
    .param("n_max", hyp_n);
    if hyp_n > 0 {
        checks.push(worst.finish(b, 1e-8, false));
    }

    let points = r
        .iter()
        .enumerate()
        .map(|(n, &v)| SweepPoint { axis: n as f64, value: v, margin: None })
        .collect();
    let sweeps = vec![
        SweepResult::new(id.clone(), Axis::SeriesLength, points, false),
        SweepResult::new(format!("{id}/hypothesis"), Axis::Order, hyp_points, false),
    ];
    Ok((checks, sweeps))
}

/// Growth of the generator norm estimate with the energy budget, an
/// advisory diagnostic: the log-log slope of `E ↦ ‖S‖_{⋄,E}` should stay
/// below 1.
pub fn check_escaling(
    dynamics: Dynamics,
    a: &CMat,
    label: &str,
    g: &DiscreteOperator,
    e_grid: &[f64],
    opts: &EcdOptions,
) -> Result<(Vec<CheckResult>, SweepResult)> {
    if e_grid.is_empty() || e_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return invalid("energy grid must be nonempty and positive");
    }
    let s = generator(dynamics, a)?;
    let mut points = Vec::new();
    for &e in e_grid {
        let v = ecd_lower(&s, g, e, opts)?.value;
        points.push(SweepPoint { axis: e, value: v, margin: None });
    }
    let sweep = SweepResult::new(format!("escaling/{}/{label}", dynamics.name()), Axis::Energy, points, true);
    let b = CheckBuilder::new(
        format!("escaling/{}/{label}", dynamics.name()),
        "‖S‖_{⋄,E} = o(E): log-log slope in E below 1",
    )
    .param("dynamics", dynamics.name())
    .param("operator", label)
    .param("dim", g.dim())
    .param("energies", json!(e_grid))
    .param("seed", opts.seed)
    .param("restarts", opts.restarts);
    let slope = sweep.fitted_slope.unwrap_or(f64::NAN);
    Ok((vec![b.finish_advisory(slope, 1.0, 0.0)], sweep))
}
