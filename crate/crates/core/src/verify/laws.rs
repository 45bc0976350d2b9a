use rand::Rng;
use serde_json::json;

use super::{fit_loglog_slope, CheckBuilder, CheckResult, Worst};
use crate::enorm::{enorm, max_linear_objective_diag};
use crate::error::{invalid, Result};
use crate::linalg::{eigh, CMat, C64};
use crate::operators::{DiscreteOperator, Family};
use crate::random::{derive_seed, random_hermitian, random_unitary, rng, Rng64};
use crate::semigroups::{
    commutator_generator, exp_semigroup_at, gaussian_channel_at, gaussian_generator, gkls_generator, random_gkls,
    unitary_channel_at, GaussianMethod, DEFAULT_NODES,
};
use crate::superop::{ecd_lower, EcdOptions, Superoperator};

/// Duality gaps of the constrained maximization on `n` random Hermitian
/// objectives, dimension drawn from `2..=d_max`, energies cycled from
/// `e_list`. Each gap must be at most `1e-7 (1 + |value|)`.
pub fn check_enorm_duality(n: usize, d_max: usize, e_list: &[f64], seed: u64) -> Result<CheckResult> {
    if n == 0 || d_max < 2 || e_list.is_empty() {
        return invalid("duality check needs samples, d_max ≥ 2 and energies");
    }
    let b = CheckBuilder::new("enorm_duality", "dual value − primal value ≤ 1e-7 (1 + |value|)")
        .param("samples_requested", n)
        .param("max_dim", d_max)
        .param("energies", json!(e_list))
        .param("seed", seed);
    let mut r = rng(seed);
    let mut w = Worst::new();
    let mut gs = Vec::new();
    for d in 2..=d_max {
        gs.push(DiscreteOperator::number(d)?);
    }
    for i in 0..n {
        let d = r.random_range(2..=d_max);
        let m = random_hermitian(&mut r, d);
        let e = e_list[i % e_list.len()];
        let res = max_linear_objective_diag(&m, gs[d - 2].eigenvalues(), e)?;
        w.push(res.gap.abs() / (1.0 + res.primal_value.abs()), 1e-7, 0.0);
    }
    Ok(w.finish(b, 0.0, false))
}

/// `‖√G‖_E = √E` for the number operator of dimension `d`.
pub fn check_sqrt_g_values(d: usize, e_list: &[f64]) -> Result<CheckResult> {
    let g = DiscreteOperator::number(d)?;
    let a = g.family(Family::Power { alpha: 0.5 })?.into_matrix();
    let b = CheckBuilder::new("sqrt_g_value", "‖√G‖_E = √E")
        .param("dim", d)
        .param("energies", json!(e_list))
        .param("seed", 0);
    let mut w = Worst::new();
    for &e in e_list {
        w.push((enorm(&a, &g, e)?.value - e.sqrt()).abs(), 0.0, 1e-9);
    }
    Ok(w.finish(b, 1e-9, false))
}

/// Channels have ECD norm 1 at every budget: `n` random channels on
/// dimension `d`, alternating GKLS exponentials and unitary conjugations.
pub fn check_channel_normalization(
    n: usize,
    d: usize,
    e_list: &[f64],
    seed: u64,
    opts: &EcdOptions,
) -> Result<CheckResult> {
    let g = DiscreteOperator::number(d)?;
    let b = CheckBuilder::new("channel_normalization", "‖Φ‖_{⋄,E} = 1 for channels Φ")
        .param("channels", n)
        .param("dim", d)
        .param("energies", json!(e_list))
        .param("seed", seed)
        .param("restarts", opts.restarts);
    let mut r = rng(seed);
    let mut w = Worst::new();
    for i in 0..n {
        let phi = if i % 2 == 0 {
            let (v, k) = random_gkls(&mut r, d, 2, 1.0);
            let t: f64 = r.random_range(0.1..1.0);
            exp_semigroup_at(&gkls_generator(&v, &k)?, t)?
        } else {
            Superoperator::conjugation(&random_unitary(&mut r, d))?
        };
        for (j, &e) in e_list.iter().enumerate() {
            let o = EcdOptions { seed: derive_seed(seed, (i * e_list.len() + j) as u64), ..*opts };
            let v = ecd_lower(&phi, &g, e, &o)?.value;
            w.push((v - 1.0).abs(), 0.0, 1e-6);
        }
    }
    Ok(w.finish(b, 1e-6, false))
}

fn scaled_hermitian(r: &mut Rng64, d: usize, radius: f64) -> CMat {
    let a = random_hermitian(r, d);
    let ev = eigh(&a);
    let s = ev.max().abs().max(ev.min().abs());
    a * C64::new(radius / s, 0.0)
}

/// `max |Tr S(X)|` over matrix units, via `S†(I)`.
fn trace_defect(s: &Superoperator) -> Result<f64> {
    let d = s.d_out();
    let id = CMat::identity(d, d);
    Ok(s.adjoint().apply(&id)?.iter().fold(0.0, |m, z| m.max(z.norm())))
}

/// Semigroup laws on random instances of dimension `d`: composition,
/// exponential of the generator against the closed forms, `Z_A = S_A²/2`,
/// quadrature against the closed Gaussian form, the channel property,
/// trace annihilation by generators and first-order finite differences.
pub fn check_semigroup_laws(d: usize, seed: u64) -> Result<Vec<CheckResult>> {
    if d < 2 {
        return invalid("dimension must be at least 2");
    }
    let mut r = rng(seed);
    let a = scaled_hermitian(&mut r, d, 2.0);
    let (v, k) = random_gkls(&mut r, d, 2, 1.0);
    let (s, t) = (r.random_range(0.05..0.5), r.random_range(0.05..0.5));
    let sa = commutator_generator(&a)?;
    let za = gaussian_generator(&a)?;
    let sg = gkls_generator(&v, &k)?;
    let base = |id: &str, claim: &str| {
        CheckBuilder::new(id, claim).param("dim", d).param("seed", seed).param("s", s).param("t", t)
    };
    let lam = |x: f64| unitary_channel_at(&a, x);
    let xi = |x: f64| gaussian_channel_at(&a, x, GaussianMethod::ClosedForm);
    let gk = |x: f64| exp_semigroup_at(&sg, x);
    let mut out = Vec::new();

    let mut w = Worst::new();
    w.push(lam(s)?.compose(&lam(t)?)?.distance(&lam(s + t)?)?, 0.0, 1e-10);
    w.push(xi(s)?.compose(&xi(t)?)?.distance(&xi(s + t)?)?, 0.0, 1e-10);
    w.push(gk(s)?.compose(&gk(t)?)?.distance(&gk(s + t)?)?, 0.0, 1e-10);
    out.push(w.finish(base("semigroup_composition", "Φ_s ∘ Φ_t = Φ_{s+t}"), 1e-10, false));

    let mut w = Worst::new();
    for x in [t, 1.0] {
        w.push(exp_semigroup_at(&sa, x)?.distance(&lam(x)?)?, 0.0, 1e-9);
        w.push(exp_semigroup_at(&za, x)?.distance(&xi(x)?)?, 0.0, 1e-9);
    }
    out.push(w.finish(base("generator_exponential", "e^{tS_A} = Λ_t, e^{tZ_A} = Ξ_t"), 1e-9, false));

    let diff = sa.compose(&sa)?.scale(0.5).distance(&za)?;
    out.push(base("gaussian_generator_square", "Z_A = S_A²/2").finish(diff, 0.0, 1e-12));

    let mut w = Worst::new();
    for x in [t, 1.0] {
        let q = gaussian_channel_at(&a, x, GaussianMethod::Quadrature(DEFAULT_NODES))?;
        w.push(q.distance(&xi(x)?)?, 0.0, 1e-8);
    }
    let b = base("gaussian_quadrature", "Gauss–Hermite average equals the closed form").param("nodes", DEFAULT_NODES);
    out.push(w.finish(b, 1e-8, false));

    let mut w = Worst::new();
    for phi in [lam(t)?, xi(t)?, gk(t)?] {
        w.push(if phi.is_channel() { 0.0 } else { 1.0 }, 0.0, 0.0);
    }
    out.push(w.finish(base("channel_flags", "Φ_t is completely positive and trace preserving"), 0.0, false));

    let mut w = Worst::new();
    for gen in [&sa, &za, &sg] {
        w.push(trace_defect(gen)?, 0.0, 1e-12);
    }
    out.push(w.finish(base("generator_trace", "Tr S(X) = 0"), 1e-12, false));

    let hs: Vec<f64> = (0..6).map(|i| 1e-5 * 10f64.powf(i as f64 * 0.6)).collect();
    let id = Superoperator::identity(d);
    let kinds: [(&str, &Superoperator, &dyn Fn(f64) -> Result<Superoperator>); 3] =
        [("unitary", &sa, &lam), ("gaussian", &za, &xi), ("gkls", &sg, &gk)];
    for (name, gen, flow) in kinds {
        let mut pts = Vec::new();
        for &h in &hs {
            let fd = flow(h)?.sub(&id)?.scale(1.0 / h);
            pts.push((h, fd.distance(gen)?));
        }
        let slope = fit_loglog_slope(&pts).unwrap_or(0.0);
        out.push(
            base(&format!("finite_difference/{name}"), "(Φ_h − id)/h → S at rate h")
                .param("h", json!(hs))
                .finish(0.9, slope, 0.0),
        );
    }
    Ok(out)
}
