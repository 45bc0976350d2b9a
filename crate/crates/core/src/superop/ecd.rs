//! Lower bounds on the energy-constrained diamond norm
//! `sup ‖(Φ ⊗ id_R)(ρ)‖₁` over states on `A ⊗ R` with `Tr(ρ_A G) ≤ E`.
//!
//! The estimator alternates two exact half-steps from several starts: for a
//! fixed pure input the best contraction is the sign of the output; for a
//! fixed contraction `W` the best input maximizes `⟨ψ|(Φ† ⊗ id)(W)|ψ⟩` under
//! the energy budget, which the dual solver answers exactly. The objective
//! never decreases.
//!
//! Maps acting entrywise, `X ↦ m ∘ X`, send `Σ_jk ψ_j ψ̄_k |jj⟩⟨kk|` to
//! `Σ_jk m_jk ψ_j ψ̄_k |jj⟩⟨kk|`, and the output trace norm for any input
//! depends only on the diagonal of `ρ_A`. For those maps the search runs on
//! the correlated subspace spanned by `|jj⟩`, which loses nothing.
//!
//! On that subspace the value is `H(p) = ‖D m D‖₁` with `D = diag(√p)` and
//! `p = |ψ|²`. `H` is concave (it is the support function of
//! `{Y : −P ⪯ Y ⪯ P}` evaluated at `m`, maximized over `Y`), so after a few
//! alternation steps the reduced path switches to projected gradient ascent
//! on the polytope `{p ≥ 0, Σp = 1, Σ p_j E_j ≤ E}`, and reports the
//! Frank–Wolfe gap at the end point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Superoperator;
use crate::enorm::max_linear_objective_diag;
use crate::error::{invalid, Error, Result};
use crate::linalg::{eigh, sign_and_trace_norm, trace_norm, CMat, CVec, C64};
use crate::operators::{blend_to_budget, sample_constrained_vector, DiscreteOperator};
use crate::random::{derive_seed, rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Stop when a step gains at most this much (relative to the map's scale).
    pub tol: f64,
}

impl Default for EcdOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 200,
            seed: 0,
            tol: 1e-10,
        }
    }
}

/// The contraction that certifies the value of the witness.
#[derive(Debug, Clone)]
pub enum Contraction {
    /// On the full space `A_out ⊗ R`.
    Full(CMat),
    /// On the span of `|jj⟩`, indexed by `j`.
    Correlated(CMat),
}

impl Contraction {
    pub fn to_dense(&self) -> CMat {
        match self {
            Contraction::Full(w) => w.clone(),
            Contraction::Correlated(w) => {
                let d = w.nrows();
                let mut out = CMat::zeros(d * d, d * d);
                for j in 0..d {
                    for k in 0..d {
                        out[(j * d + j, k * d + k)] = w[(j, k)];
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EcdEstimate {
    pub value: f64,
    /// Unit vector on `A ⊗ R` with `d_R = d_A`, index `a · d_R + r`.
    pub witness: CVec,
    pub witness_contraction: Contraction,
    /// Accepted steps of the best restart.
    pub iterations: usize,
    pub restart_values: Vec<f64>,
    /// Objective after each accepted step, per restart.
    pub trajectories: Vec<Vec<f64>>,
    /// Entrywise maps only: Frank–Wolfe gap of the reduced objective at the
    /// witness. Where the objective is differentiable, `value + gap` bounds
    /// the norm from above.
    pub stationarity_gap: Option<f64>,
}

impl EcdEstimate {
    pub fn witness_energy(&self, g: &DiscreteOperator) -> f64 {
        g.energy_of_vector(&self.witness).expect("witness lives on A ⊗ R")
    }

    /// Largest minus smallest restart value.
    pub fn restart_spread(&self) -> f64 {
        let lo = self.restart_values.iter().cloned().fold(f64::INFINITY, f64::min);
        self.value - lo
    }
}

/// `‖(Φ ⊗ id_R)(ρ)‖₁` for an operator `ρ` on `A ⊗ R`.
pub fn extended_trace_norm(phi: &Superoperator, rho: &CMat, d_r: usize) -> Result<f64> {
    trace_norm(&phi.apply_extended(rho, d_r)?)
}

struct Run {
    value: f64,
    psi: CVec,
    w: CMat,
    trajectory: Vec<f64>,
    gap: Option<f64>,
}

/// Multi-start alternating maximization; the result lower-bounds the norm.
pub fn ecd_lower(phi: &Superoperator, g: &DiscreteOperator, e: f64, opts: &EcdOptions) -> Result<EcdEstimate> {
    if !(e > 0.0 && e.is_finite()) {
        return invalid(format!("energy budget must be positive and finite, got {e}"));
    }
    if phi.d_in() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: phi.d_in(),
        });
    }
    if !phi.is_hermitian_preserving() {
        return invalid("map is not Hermitian-preserving");
    }
    if opts.restarts == 0 {
        return invalid("at least one restart is needed");
    }
    let d = g.dim();
    let scale = phi.max_abs();
    let reduced = phi.schur_symbol().is_some();
    let energies: Vec<f64> = if reduced {
        g.eigenvalues().to_vec()
    } else {
        g.kron_identity(d)
    };
    let starts: Vec<CVec> = (0..opts.restarts)
        .map(|i| {
            if i == 0 {
                entangled_start(&energies, d, reduced, e)
            } else {
                sample_constrained_vector(&energies, e, derive_seed(opts.seed, i as u64))
            }
        })
        .collect();

    if scale == 0.0 {
        let psi = embed(&starts[0], d, reduced);
        let n = if reduced { d } else { d * phi.d_out() };
        return Ok(EcdEstimate {
            value: 0.0,
            witness: psi,
            witness_contraction: wrap(CMat::identity(n, n), reduced),
            iterations: 0,
            restart_values: vec![0.0; opts.restarts],
            trajectories: vec![vec![0.0]; opts.restarts],
            stationarity_gap: reduced.then_some(0.0),
        });
    }

    let runs: Vec<Result<Run>> = if reduced {
        let m = phi.schur_symbol().expect("reduced path") / C64::new(scale, 0.0);
        let mt = m.transpose();
        starts
            .into_par_iter()
            .map(|s| {
                let warm = EcdOptions { max_iters: opts.max_iters.min(WARMUP_ITERS), ..*opts };
                let run = alternate(s, &warm, &energies, e, |psi| reduced_output(&m, psi), |w| w.component_mul(&mt))?;
                Ok(polish(&m, run, &energies, e, opts))
            })
            .collect()
    } else {
        let unit = phi.scale(1.0 / scale);
        let adj = unit.adjoint();
        starts
            .into_par_iter()
            .map(|s| {
                alternate(
                    s,
                    opts,
                    &energies,
                    e,
                    |psi| unit.apply_extended(&(psi * psi.adjoint()), d).expect("shapes checked"),
                    |w| adj.apply_extended(w, d).expect("shapes checked"),
                )
            })
            .collect()
    };
    let runs: Vec<Run> = runs.into_iter().collect::<Result<_>>()?;

    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let restart_values = runs.iter().map(|r| r.value * scale).collect();
    let trajectories = runs
        .iter()
        .map(|r| r.trajectory.iter().map(|v| v * scale).collect())
        .collect();
    let chosen = &runs[best];
    Ok(EcdEstimate {
        value: chosen.value * scale,
        witness: embed(&chosen.psi, d, reduced),
        witness_contraction: wrap(chosen.w.clone(), reduced),
        iterations: chosen.trajectory.len() - 1,
        restart_values,
        trajectories,
        stationarity_gap: chosen.gap.map(|g| g * scale),
    })
}

fn wrap(w: CMat, reduced: bool) -> Contraction {
    if reduced {
        Contraction::Correlated(w)
    } else {
        Contraction::Full(w)
    }
}

/// `Σ_j ψ_j |jj⟩` for the reduced path, otherwise `ψ` itself.
fn embed(psi: &CVec, d: usize, reduced: bool) -> CVec {
    if !reduced {
        return psi.clone();
    }
    let mut out = CVec::zeros(d * d);
    for j in 0..d {
        out[j * d + j] = psi[j];
    }
    out
}

/// Maximally entangled state, pulled toward the ground space if over budget.
fn entangled_start(energies: &[f64], d: usize, reduced: bool, e: f64) -> CVec {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let v = if reduced {
        CVec::from_element(d, amp)
    } else {
        embed(&CVec::from_element(d, amp), d, true)
    };
    blend_to_budget(energies, e, v)
}

fn reduced_output(m: &CMat, psi: &CVec) -> CMat {
    (psi * psi.adjoint()).component_mul(m)
}

fn alternate(
    start: CVec,
    opts: &EcdOptions,
    energies: &[f64],
    e: f64,
    forward: impl Fn(&CVec) -> CMat,
    pullback: impl Fn(&CMat) -> CMat,
) -> Result<Run> {
    let (mut w, mut value) = sign_and_trace_norm(&forward(&start));
    let mut psi = start;
    let mut trajectory = vec![value];
    for _ in 0..opts.max_iters {
        let m = pullback(&w);
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let step = max_linear_objective_diag(&m, energies, e)?;
        let (w_new, v_new) = sign_and_trace_norm(&forward(&step.witness));
        if !(v_new > value) {
            break;
        }
        let gain = v_new - value;
        psi = step.witness;
        w = w_new;
        value = v_new;
        trajectory.push(value);
        if gain <= opts.tol {
            break;
        }
    }
    Ok(Run {
        value,
        psi,
        w,
        trajectory,
        gap: None,
    })
}

/// Alternation steps on the reduced path before projected gradient takes over.
const WARMUP_ITERS: usize = 1;

/// `H(p)`, its gradient and the sign of `D m D`.
struct Point {
    p: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
    sign: CMat,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∂H/∂p_j = Σ_k |(m D v_k)_j|² / |λ_k|` over the nonzero eigenpairs of
/// `D m D`, which avoids dividing by `p_j`.
fn evaluate(m: &CMat, p: Vec<f64>) -> Point {
    let d = p.len();
    let sp: Vec<f64> = p.iter().map(|x| x.max(0.0).sqrt()).collect();
    let x = CMat::from_fn(d, d, |j, k| m[(j, k)] * (sp[j] * sp[k]));
    let eig = eigh(&x);
    let value = eig.values.iter().map(|v| v.abs()).sum();
    let top = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut dv = eig.vectors.clone();
    for (j, s) in sp.iter().enumerate() {
        dv.row_mut(j).scale_mut(*s);
    }
    let b = m * dv;
    let mut grad = vec![0.0; d];
    for (k, l) in eig.values.iter().enumerate() {
        let l = l.abs();
        if l <= 1e-13 * top {
            continue;
        }
        for (j, gj) in grad.iter_mut().enumerate() {
            *gj += b[(j, k)].norm_sqr() / l;
        }
    }
    let sign = eig.map(|l| if l < 0.0 { -1.0 } else { 1.0 }).expect("sign is finite");
    Point { p, value, grad, sign }
}

fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let (mut sum, mut tau) = (0.0, 0.0);
    for (i, v) in u.iter().enumerate() {
        sum += v;
        let t = (sum - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    y.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Euclidean projection onto `{p ≥ 0, Σp = 1, Σ p_j E_j ≤ E}`: a simplex
/// projection of `y − λE` with the multiplier `λ ≥ 0` found by bisection.
fn project(y: &[f64], energies: &[f64], e: f64) -> Vec<f64> {
    let q = project_simplex(y);
    if dot(&q, energies) <= e {
        return q;
    }
    let at = |lam: f64| {
        let shifted: Vec<f64> = y.iter().zip(energies).map(|(v, en)| v - lam * en).collect();
        project_simplex(&shifted)
    };
    let mut hi = 1.0;
    for _ in 0..1100 {
        if dot(&at(hi), energies) <= e {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dot(&at(mid), energies) > e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

/// `max ⟨g, q⟩` over the polytope. Its vertices put mass on one level with
/// `E_j ≤ E` or on two levels straddling `E` with the budget saturated.
fn linear_max(g: &[f64], energies: &[f64], e: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (j, &ej) in energies.iter().enumerate() {
        if ej <= e {
            best = best.max(g[j]);
            for (k, &ek) in energies.iter().enumerate() {
                if ek > e {
                    let t = (e - ej) / (ek - ej);
                    best = best.max((1.0 - t) * g[j] + t * g[k]);
                }
            }
        }
    }
    best
}

/// Spectral projected gradient ascent on `H` from the end of a warm-up run,
/// with Barzilai–Borwein steps and Armijo backtracking.
fn polish(m: &CMat, warm: Run, energies: &[f64], e: f64, opts: &EcdOptions) -> Run {
    let p0: Vec<f64> = warm.psi.iter().map(|z| z.norm_sqr()).collect();
    let mut cur = evaluate(m, project(&p0, energies, e));
    let mut trajectory = warm.trajectory.clone();
    let mut alpha = 1.0;
    let mut gap = linear_max(&cur.grad, energies, e) - dot(&cur.p, &cur.grad);
    for _ in 0..opts.max_iters {
        if gap <= opts.tol {
            break;
        }
        let y: Vec<f64> = cur.p.iter().zip(&cur.grad).map(|(p, g)| p + alpha * g).collect();
        let dir: Vec<f64> = project(&y, energies, e).iter().zip(&cur.p).map(|(q, p)| q - p).collect();
        let slope = dot(&cur.grad, &dir);
        if !(slope > 0.0) {
            break;
        }
        let mut tau = 1.0;
        let mut next = None;
        while tau > 1e-12 {
            let cand: Vec<f64> = cur.p.iter().zip(&dir).map(|(p, d)| (p + tau * d).max(0.0)).collect();
            let pt = evaluate(m, cand);
            if pt.value >= cur.value + 1e-4 * tau * slope {
                next = Some(pt);
                break;
            }
            tau *= 0.5;
        }
        let Some(next) = next else { break };
        let s: Vec<f64> = next.p.iter().zip(&cur.p).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        alpha = if sy < 0.0 { (dot(&s, &s) / -sy).clamp(1e-10, 1e10) } else { (alpha * 4.0).min(1e10) };
        cur = next;
        gap = linear_max(&cur.grad, energies, e) - dot(&cur.p, &cur.grad);
        if cur.value > *trajectory.last().expect("nonempty") {
            trajectory.push(cur.value);
        }
    }
    if !(cur.value > warm.value) {
        return Run { gap: Some(gap.max(0.0)), ..warm };
    }
    let psi = CVec::from_iterator(cur.p.len(), cur.p.iter().map(|p| C64::new(p.sqrt(), 0.0)));
    Run {
        value: cur.value,
        psi,
        w: cur.sign,
        trajectory,
        gap: Some(gap.max(0.0)),
    }
}

const BRUTE_GRID: usize = 100;
const BRUTE_RANDOM: usize = 100_000;
const BRUTE_REFINE_ROUNDS: usize = 6;

/// Grid and random search over qubit marginals (`d_A = 2`), an independent
/// check of [`ecd_lower`].
///
/// For pure inputs the output trace norm depends only on `ρ_A`, so the search
/// runs over the Bloch ball cut by the energy constraint, purifying each
/// marginal as `vec(√ρ_A)`. A 100³ grid that includes the constraint plane and
/// the sphere is followed by 10⁵ random points and a local refinement.
pub fn ecd_brute(phi: &Superoperator, g: &DiscreteOperator, e: f64) -> Result<f64> {
    if phi.d_in() != 2 || g.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "ecd_brute supports d_A = 2, got {}",
            phi.d_in()
        )));
    }
    if !(e > 0.0) {
        return invalid("energy budget must be positive");
    }
    let e1 = g.eigenvalues()[1];
    // Energy (1 − r_z) E_1 / 2 ≤ E.
    let rz_min = if e1 > 0.0 { (1.0 - 2.0 * e / e1).max(-1.0) } else { -1.0 };
    let units: Vec<CMat> = (0..4)
        .map(|k| {
            let mut u = CMat::zeros(2, 2);
            u[(k % 2, k / 2)] = C64::new(1.0, 0.0);
            phi.apply(&u).expect("qubit input")
        })
        .collect();
    let d_out = phi.d_out();
    let eval = |rz: f64, s: f64, ph: f64| -> f64 {
        let rz = rz.clamp(rz_min, 1.0);
        let s = s.clamp(0.0, 1.0);
        let rt = s * (1.0 - rz * rz).max(0.0).sqrt();
        brute_value(&units, d_out, [rt * ph.cos(), rt * ph.sin(), rz])
    };

    let n = BRUTE_GRID;
    let tau = std::f64::consts::TAU;
    let rz_at = |i: usize| rz_min + (1.0 - rz_min) * i as f64 / (n - 1) as f64;
    let s_at = |j: usize| j as f64 / (n - 1) as f64;
    let ph_at = |k: usize| tau * k as f64 / n as f64;
    let (mut best, mut arg) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut b = (f64::NEG_INFINITY, (0.0, 0.0, 0.0));
            for j in 0..n {
                for k in 0..n {
                    let v = eval(rz_at(i), s_at(j), ph_at(k));
                    if v > b.0 {
                        b = (v, (rz_at(i), s_at(j), ph_at(k)));
                    }
                }
            }
            b
        })
        .reduce(|| (f64::NEG_INFINITY, (0.0, 0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });

    use rand::Rng;
    let mut r = rng(0x0ecd);
    for _ in 0..BRUTE_RANDOM {
        let p = (r.random_range(rz_min..=1.0), r.random::<f64>().sqrt(), r.random_range(0.0..tau));
        let v = eval(p.0, p.1, p.2);
        if v > best {
            best = v;
            arg = p;
        }
    }

    let mut h = (
        (1.0 - rz_min) / (n - 1) as f64,
        1.0 / (n - 1) as f64,
        tau / n as f64,
    );
    for _ in 0..BRUTE_REFINE_ROUNDS {
        let center = arg;
        for a in -5..=5 {
            for b in -5..=5 {
                for c in -5..=5 {
                    let p = (
                        (center.0 + h.0 * a as f64 / 2.5).clamp(rz_min, 1.0),
                        (center.1 + h.1 * b as f64 / 2.5).clamp(0.0, 1.0),
                        center.2 + h.2 * c as f64 / 2.5,
                    );
                    let v = eval(p.0, p.1, p.2);
                    if v > best {
                        best = v;
                        arg = p;
                    }
                }
            }
        }
        h = (h.0 / 4.0, h.1 / 4.0, h.2 / 4.0);
    }
    Ok(best)
}

/// `‖(Φ ⊗ id)(|ψ⟩⟨ψ|)‖₁` with `ψ = vec(√ρ_A)` for the Bloch vector `r`.
fn brute_value(units: &[CMat], d_out: usize, r: [f64; 3]) -> f64 {
    let rho = CMat::from_row_slice(
        2,
        2,
        &[
            C64::new((1.0 + r[2]) / 2.0, 0.0),
            C64::new(r[0] / 2.0, -r[1] / 2.0),
            C64::new(r[0] / 2.0, r[1] / 2.0),
            C64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    );
    let det = ((1.0 - (r[0] * r[0] + r[1] * r[1] + r[2] * r[2])) / 4.0).max(0.0);
    let sd = det.sqrt();
    let mut sq = rho.clone();
    sq[(0, 0)] += C64::new(sd, 0.0);
    sq[(1, 1)] += C64::new(sd, 0.0);
    let sq = sq / C64::new((1.0 + 2.0 * sd).sqrt(), 0.0);
    // Block (r, s) of the output is Σ_ij Ψ[i, r] conj(Ψ[j, s]) Φ(|i⟩⟨j|).
    let mut out = CMat::zeros(2 * d_out, 2 * d_out);
    for rr in 0..2 {
        for ss in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let c = sq[(i, rr)] * sq[(j, ss)].conj();
                    let u = &units[i + 2 * j];
                    for a in 0..d_out {
                        for b in 0..d_out {
                            out[(a * 2 + rr, b * 2 + ss)] += c * u[(a, b)];
                        }
                    }
                }
            }
        }
    }
    eigh(&out).values.iter().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary};
    use approx::assert_abs_diff_eq;

    fn dephasing_minus_id() -> Superoperator {
        let mut m = CMat::from_element(2, 2, C64::new(1.0, 0.0));
        m[(0, 1)] = C64::new(0.0, 0.0);
        m[(1, 0)] = C64::new(0.0, 0.0);
        Superoperator::schur(m).unwrap().sub(&Superoperator::identity(2)).unwrap()
    }

    #[test]
    fn dephasing_closed_form() {
        // ‖D − id‖ = 2√(E(1 − E)) for E ≤ 1/2 and 1 above.
        let g = DiscreteOperator::number(2).unwrap();
        let phi = dephasing_minus_id();
        for e in [0.1f64, 0.3, 0.5, 1.0] {
            let est = ecd_lower(&phi, &g, e, &EcdOptions::default()).unwrap();
            let exact = if e <= 0.5 { 2.0 * (e * (1.0 - e)).sqrt() } else { 1.0 };
            assert_abs_diff_eq!(est.value, exact, epsilon = 1e-8);
        }
    }

    #[test]
    fn dense_and_reduced_paths_agree() {
        let g = DiscreteOperator::number(3).unwrap();
        let mut r = rng(3);
        let a = random_hermitian(&mut r, 3);
        let schur = Superoperator::schur(a).unwrap();
        let dense = Superoperator::from_action(schur.action().clone(), 3, 3).unwrap();
        let opts = EcdOptions::default();
        let x = ecd_lower(&schur, &g, 0.7, &opts).unwrap();
        let y = ecd_lower(&dense, &g, 0.7, &opts).unwrap();
        assert!(y.value <= x.value + 1e-8);
        assert!((x.value - y.value).abs() < 1e-4 * (1.0 + x.value));
    }

    #[test]
    fn estimate_invariants() {
        let g = DiscreteOperator::number(3).unwrap();
        let mut r = rng(4);
        let u = random_unitary(&mut r, 3);
        let phi = Superoperator::conjugation(&u).unwrap().sub(&Superoperator::identity(3)).unwrap();
        let est = ecd_lower(&phi, &g, 0.5, &EcdOptions::default()).unwrap();
        assert!(est.witness_energy(&g) <= 0.5 + 1e-8);
        let rho = &est.witness * est.witness.adjoint();
        let direct = extended_trace_norm(&phi, &rho, 3).unwrap();
        assert_abs_diff_eq!(direct, est.value, epsilon = 1e-9);
        let w = est.witness_contraction.to_dense();
        let x = phi.apply_extended(&rho, 3).unwrap();
        assert_abs_diff_eq!((w * x).trace().re, est.value, epsilon = 1e-9);
        for v in &est.restart_values {
            assert!(*v <= est.value + 1e-10);
        }
        for t in &est.trajectories {
            assert!(t.windows(2).all(|p| p[1] >= p[0]));
        }
        assert!(est.value <= 2.0 + 1e-9);
    }

    #[test]
    fn channels_have_unit_norm() {
        let g = DiscreteOperator::number(3).unwrap();
        let mut r = rng(5);
        let u = random_unitary(&mut r, 3);
        let ch = Superoperator::conjugation(&u).unwrap();
        for e in [0.2, 1.0, 5.0] {
            let est = ecd_lower(&ch, &g, e, &EcdOptions::default()).unwrap();
            assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = DiscreteOperator::number(2).unwrap();
        let mut r = rng(6);
        let non_hp = Superoperator::from_action(crate::random::ginibre(&mut r, 4, 4), 2, 2).unwrap();
        assert!(ecd_lower(&non_hp, &g, 1.0, &EcdOptions::default()).is_err());
        assert!(ecd_lower(&dephasing_minus_id(), &g, 0.0, &EcdOptions::default()).is_err());
        let g3 = DiscreteOperator::number(3).unwrap();
        assert!(ecd_lower(&dephasing_minus_id(), &g3, 1.0, &EcdOptions::default()).is_err());
        assert!(ecd_brute(&Superoperator::identity(3), &g3, 1.0).is_err());
    }

    #[test]
    fn zero_map() {
        let g = DiscreteOperator::number(2).unwrap();
        let z = Superoperator::identity(2).sub(&Superoperator::identity(2)).unwrap();
        assert_eq!(ecd_lower(&z, &g, 1.0, &EcdOptions::default()).unwrap().value, 0.0);
        assert_eq!(ecd_brute(&z, &g, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn brute_matches_closed_form() {
        let g = DiscreteOperator::number(2).unwrap();
        let phi = dephasing_minus_id();
        for e in [0.1f64, 0.5] {
            let exact = if e <= 0.5 { 2.0 * (e * (1.0 - e)).sqrt() } else { 1.0 };
            let b = ecd_brute(&phi, &g, e).unwrap();
            assert!(b <= exact + 1e-9);
            assert!(exact - b < 1e-3);
        }
    }
}
