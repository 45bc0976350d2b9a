use rand::Rng;
use serde_json::json;

use super::{CheckBuilder, CheckResult, Worst};
use crate::enorm::{enorm, gram, max_linear_objective_diag};
use crate::error::{invalid, Result};
use crate::linalg::{hermitian_function, kron, trace_norm, CMat, C64};
use crate::operators::{sample_constrained_vector, sqrtg_bound_estimate, DiscreteOperator};
use crate::random::{derive_seed, ginibre, random_hermitian, rng, Rng64};
use crate::semigroups::unitary_channel_at;
use crate::superop::ecd::extended_trace_norm;
use crate::superop::{ecd_lower, sandwich, EcdOptions, Superoperator};

/// Random positive `ρ` with `Tr ρ ≤ 1` and `Tr(ρ g) ≤ E`, for a diagonal `g`
/// whose first entry is 0.
///
/// A Ginibre state of random rank is mixed with `|0⟩⟨0|` just enough to meet
/// the budget, then, half of the time, scaled down in trace.
pub fn random_feasible_operator(r: &mut Rng64, g: &[f64], e: f64) -> CMat {
    let d = g.len();
    let rank = if r.random_bool(1.0 / 3.0) { 1 } else { r.random_range(1..=d) };
    let x = ginibre(r, d, rank);
    let mut rho = &x * x.adjoint();
    let tr = rho.trace().re;
    rho /= C64::new(tr, 0.0);
    let energy: f64 = (0..d).map(|i| g[i] * rho[(i, i)].re).sum();
    if energy > e {
        let keep = e / energy;
        rho *= C64::new(keep, 0.0);
        rho[(0, 0)] += C64::new(1.0 - keep, 0.0);
    }
    if r.random_bool(0.5) {
        rho *= C64::new(r.random_range(0.3..1.0), 0.0);
    }
    rho
}

fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn random_psd(r: &mut Rng64, d: usize) -> CMat {
    let x = ginibre(r, d, d);
    hermitian_part(&(&x * x.adjoint())) / C64::new(d as f64, 0.0)
}

fn params(b: CheckBuilder, g: &DiscreteOperator, e: f64, seed: u64) -> CheckBuilder {
    b.param("dim", g.dim()).param("energy", e).param("seed", seed)
}

/// Randomized checks of the E-norm inequalities on `n_samples` instances:
///
/// * `|Tr(AρB*)| ≤ ‖A‖_E ‖B‖_E` over feasible `ρ`;
/// * `‖AρB* − AσB*‖₁ ≤ ‖A‖_E f_B + ‖B‖_E f_A` with `ε = ‖ρ − σ‖₁`
///   and `f_X = √ε ‖X‖_{4E/ε}`;
/// * `‖A ⊗ I_3‖_E = ‖A‖_E` under `G ⊗ I_3`;
/// * `‖A^p‖_E ≤ ‖A‖_E^p` for positive `A`, `p ∈ {1/4, 1/2, 3/4}`;
/// * `x f(z/x) ≤ y f(z/y)` for `x < y` and `f(E) = ‖A‖²_E`;
///
/// and two advisory ones whose right side is an estimate:
///
/// * `‖(Φ ⊗ id)(ρ − σ)‖₁ ≤ 2ε ‖Φ‖_{⋄, 2E/ε²}` for pure `ρ, σ` on `A ⊗ R`
///   with `ε = ½‖ρ − σ‖₁`;
/// * `‖(Φ ⊗ id)(ρ)‖₁ ≤ ‖Φ‖_{⋄,E}` for sub-normalized mixed `ρ`.
pub fn check_inequality_suite(
    g: &DiscreteOperator,
    e: f64,
    seed: u64,
    n_samples: usize,
    opts: &EcdOptions,
) -> Result<Vec<CheckResult>> {
    if !(e > 0.0 && e.is_finite()) {
        return invalid(format!("energy budget must be positive, got {e}"));
    }
    if n_samples == 0 {
        return invalid("at least one sample is needed");
    }
    let d = g.dim();
    let gd = g.eigenvalues();
    let mut out = Vec::new();

    // |Tr AρB*| ≤ ‖A‖‖B‖
    let b = params(CheckBuilder::new("star_in", "|Tr(AρB*)| ≤ ‖A‖_E ‖B‖_E"), g, e, seed);
    let mut r = rng(derive_seed(seed, 1));
    let mut w = Worst::new();
    for _ in 0..n_samples {
        let a = random_hermitian(&mut r, d);
        let bm = random_hermitian(&mut r, d);
        let rho = random_feasible_operator(&mut r, gd, e);
        let lhs = (&a * &rho * bm.adjoint()).trace().norm();
        let rhs = enorm(&a, g, e)?.value * enorm(&bm, g, e)?.value;
        w.push(lhs, rhs, 1e-9 * (1.0 + rhs));
    }
    out.push(w.finish(b, 1e-9, false));

    // ‖AρB* − AσB*‖₁ ≤ ‖A‖ f_B + ‖B‖ f_A
    let b = params(
        CheckBuilder::new("ab_cb", "‖AρB* − AσB*‖₁ ≤ ‖A‖_E f_B(E,ε) + ‖B‖_E f_A(E,ε), f_X = √ε‖X‖_{4E/ε}"),
        g,
        e,
        seed,
    );
    let mut r = rng(derive_seed(seed, 2));
    let mut w = Worst::new();
    for _ in 0..n_samples {
        let a = random_hermitian(&mut r, d);
        let bm = random_hermitian(&mut r, d);
        let rho = random_feasible_operator(&mut r, gd, e);
        let sigma = random_feasible_operator(&mut r, gd, e);
        let eps = trace_norm(&(&rho - &sigma))?;
        if eps <= 1e-12 {
            continue;
        }
        let lhs = trace_norm(&(sandwich(&a, &rho, &bm)? - sandwich(&a, &sigma, &bm)?))?;
        let big = 4.0 * e / eps;
        let f = |x: &CMat| -> Result<f64> { Ok(eps.sqrt() * enorm(x, g, big)?.value) };
        let rhs = enorm(&a, g, e)?.value * f(&bm)? + enorm(&bm, g, e)?.value * f(&a)?;
        w.push(lhs, rhs, 1e-9 * (1.0 + rhs));
    }
    out.push(w.finish(b, 1e-9, false));

    // ‖A ⊗ I_K‖ = ‖A‖
    let d_k = 3;
    let b = params(CheckBuilder::new("tensor_identity", "‖A ⊗ I_K‖_E (under G ⊗ I_K) = ‖A‖_E"), g, e, seed)
        .param("d_k", d_k);
    let mut r = rng(derive_seed(seed, 3));
    let mut w = Worst::new();
    let gk = g.kron_identity(d_k);
    let id_k = CMat::identity(d_k, d_k);
    for _ in 0..n_samples {
        let a = random_hermitian(&mut r, d);
        let ext = max_linear_objective_diag(&gram(&kron(&a, &id_k)), &gk, e)?.primal_value.max(0.0).sqrt();
        let base = enorm(&a, g, e)?.value;
        w.push((ext - base).abs(), 0.0, 1e-8);
    }
    out.push(w.finish(b, 1e-8, false));

    // ‖A^p‖ ≤ ‖A‖^p
    for (i, p) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let b = params(CheckBuilder::new(format!("power/p={p}"), "‖A^p‖_E ≤ ‖A‖_E^p for A ≥ 0"), g, e, seed)
            .param("p", p);
        let mut r = rng(derive_seed(seed, 10 + i as u64));
        let mut w = Worst::new();
        for _ in 0..n_samples {
            let a = random_psd(&mut r, d);
            let ap = hermitian_function(&a, |x| x.max(0.0).powf(p))?.into_matrix();
            let lhs = enorm(&ap, g, e)?.value;
            let rhs = enorm(&a, g, e)?.value.powf(p);
            w.push(lhs, rhs, 1e-8);
        }
        out.push(w.finish(b, 1e-8, false));
    }

    // x f(z/x) ≤ y f(z/y)
    let b = params(
        CheckBuilder::new("concave_scaling", "x f(z/x) ≤ y f(z/y) for x < y, f(E) = ‖A‖_E²"),
        g,
        e,
        seed,
    );
    let mut r = rng(derive_seed(seed, 4));
    let mut w = Worst::new();
    for _ in 0..n_samples {
        let a = random_hermitian(&mut r, d);
        let x: f64 = r.random_range(0.05..1.0);
        let y: f64 = r.random_range(x..=1.0);
        let z: f64 = r.random_range(0.01..=e);
        let f = |en: f64| -> Result<f64> { Ok(enorm(&a, g, en)?.primal_value) };
        let lhs = x * f(z / x)?;
        let rhs = y * f(z / y)?;
        w.push(lhs, rhs, 1e-9 * (1.0 + rhs));
    }
    out.push(w.finish(b, 1e-9, false));

    // Advisory: pure-state continuity via the inflated budget.
    let gr = g.kron_identity(d);
    let phi_samples = n_samples.min(20);
    let b = params(
        CheckBuilder::new("phi_cb", "‖(Φ ⊗ id)(ρ − σ)‖₁ ≤ 2ε‖Φ‖_{⋄,2E/ε²}, ε = ½‖ρ − σ‖₁"),
        g,
        e,
        seed,
    )
    .param("restarts", opts.restarts);
    let mut r = rng(derive_seed(seed, 5));
    let mut w = Worst::new();
    for i in 0..phi_samples {
        let a = random_hermitian(&mut r, d);
        let t: f64 = r.random_range(0.05..1.0);
        let phi = unitary_channel_at(&a, t)?.sub(&Superoperator::identity(d))?;
        let psi = sample_constrained_vector(&gr, e, derive_seed(seed, 1000 + 2 * i as u64));
        let chi = sample_constrained_vector(&gr, e, derive_seed(seed, 1001 + 2 * i as u64));
        let diff = &psi * psi.adjoint() - &chi * chi.adjoint();
        let eps = 0.5 * trace_norm(&diff)?;
        if eps <= 1e-9 {
            continue;
        }
        let lhs = extended_trace_norm(&phi, &diff, d)?;
        let est = ecd_lower(&phi, g, 2.0 * e / (eps * eps), opts)?;
        let rhs = 2.0 * eps * (est.value + est.restart_spread());
        w.push(lhs, rhs, 1e-9 * (1.0 + rhs));
    }
    out.push(w.finish(b, 1e-9, true));

    // Advisory: sub-normalized mixed inputs never beat the pure-state estimate.
    let b = params(
        CheckBuilder::new("mixed_inputs", "‖(Φ ⊗ id)(ρ)‖₁ ≤ ‖Φ‖_{⋄,E} for Tr ρ ≤ 1, Tr ρ_A G ≤ E"),
        g,
        e,
        seed,
    )
    .param("restarts", opts.restarts);
    let mut r = rng(derive_seed(seed, 6));
    let mut w = Worst::new();
    for _ in 0..phi_samples.div_ceil(4) {
        let a = random_hermitian(&mut r, d);
        let t: f64 = r.random_range(0.05..1.0);
        let phi = unitary_channel_at(&a, t)?.sub(&Superoperator::identity(d))?;
        let est = ecd_lower(&phi, g, e, opts)?;
        let rhs = est.value + est.restart_spread();
        for _ in 0..4 {
            let rho = random_feasible_operator(&mut r, &gr, e);
            let lhs = extended_trace_norm(&phi, &rho, d)?;
            w.push(lhs, rhs, 1e-8);
        }
    }
    out.push(w.finish(b, 1e-8, true));
    Ok(out)
}

/// Concavity of `E ↦ ‖A‖²_E`, the sandwich
/// `‖A‖_{E₁} ≤ ‖A‖_{E₂} ≤ √(E₂/E₁) ‖A‖_{E₁}` for `E₁ < E₂`, and monotone
/// `‖A‖_E/√E`, for `n_ops` random Hermitian `A` of unit spectral norm.
pub fn check_enorm_properties(g: &DiscreteOperator, e_grid: &[f64], n_ops: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut grid = e_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 3 || grid[0] <= 0.0 {
        return invalid("energy grid needs at least 3 distinct positive points");
    }
    let d = g.dim();
    let base = |id: &str, claim: &str| {
        CheckBuilder::new(id, claim)
            .param("dim", d)
            .param("seed", seed)
            .param("operators", n_ops)
            .param("energies", json!(grid))
    };
    let (bc, bs, br) = (
        base("enorm_concavity", "E ↦ ‖A‖_E² is concave"),
        base("enorm_sandwich", "‖A‖_{E₁} ≤ ‖A‖_{E₂} ≤ √(E₂/E₁)‖A‖_{E₁} for E₁ < E₂"),
        base("enorm_sqrtg_ratio", "E ↦ ‖A‖_E/√E is nonincreasing"),
    );
    let mut r = rng(seed);
    let (mut wc, mut ws, mut wr) = (Worst::new(), Worst::new(), Worst::new());
    for _ in 0..n_ops {
        let mut a = random_hermitian(&mut r, d);
        let spec = crate::linalg::eigh(&a);
        let s = spec.max().abs().max(spec.min().abs());
        a /= C64::new(s, 0.0);
        let n: Vec<f64> = grid.iter().map(|&e| enorm(&a, g, e).map(|x| x.value)).collect::<Result<_>>()?;
        for i in 1..grid.len() - 1 {
            let f = |j: usize| n[j] * n[j];
            let left = (f(i) - f(i - 1)) / (grid[i] - grid[i - 1]);
            let right = (f(i + 1) - f(i)) / (grid[i + 1] - grid[i]);
            wc.push(right - left, 0.0, 1e-8);
        }
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                ws.push(n[i] - n[j], 0.0, 1e-8);
                ws.push(n[j], (grid[j] / grid[i]).sqrt() * n[i], 1e-8);
            }
        }
        let est = sqrtg_bound_estimate(&a, g, &grid)?;
        for w in est.ratios.windows(2) {
            wr.push(w[1].1, w[0].1, 1e-8);
        }
        wr.push(est.extrapolated_bound, est.ratios.iter().map(|x| x.1).fold(f64::INFINITY, f64::min), 1e-8);
    }
    Ok(vec![wc.finish(bc, 1e-8, false), ws.finish(bs, 1e-8, false), wr.finish(br, 1e-8, false)])
}
