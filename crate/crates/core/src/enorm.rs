//! Energy-constrained operator norms by Lagrangian duality.
//!
//! The primal problem is `sup Tr(Mρ)` over states with `Tr(Gρ) ≤ E`. Its dual
//! `g(λ) = λE + λ_max(M − λG)` is convex in `λ ≥ 0`; it is minimized by a
//! cutting-plane bracket search. The two support lines at the bracket ends
//! meet at a lower bound for `min g` which equals the value of an explicit
//! primal mixture, so every iterate carries a duality-gap certificate. The
//! final mixture is replaced by an optimal pure state from its span.

use crate::error::{invalid, Error, Result};
use crate::linalg::{eigh, is_hermitian, CMat, CVec, DensityOperator, HermitianEigen, MatrixOperator, C64};
use crate::operators::DiscreteOperator;

const MAX_DUAL_ITERS: usize = 200;

/// Result of a constrained maximization.
#[derive(Debug, Clone)]
pub struct NormResult {
    /// Norm value; for [`enorm`] the square root of the objective.
    pub value: f64,
    /// Objective `Tr(Mρ)` at the witness.
    pub primal_value: f64,
    pub dual_lambda: f64,
    /// Unit vector attaining `primal_value`.
    pub witness: CVec,
    pub dual_value: f64,
    /// `dual_value − primal_value`, on the objective scale.
    pub gap: f64,
    /// `Tr(Gρ)` at the witness.
    pub energy_used: f64,
    pub iterations: usize,
}

impl NormResult {
    pub fn witness_density(&self) -> DensityOperator {
        DensityOperator::from_pure(&self.witness).expect("witness is a unit vector")
    }
}

/// The energy operator of a constraint.
#[derive(Debug, Clone, Copy)]
pub enum Constraint<'a> {
    Diagonal(&'a [f64]),
    Dense(&'a CMat),
}

impl Constraint<'_> {
    fn dim(&self) -> usize {
        match self {
            Constraint::Diagonal(g) => g.len(),
            Constraint::Dense(g) => g.nrows(),
        }
    }

    fn energy(&self, v: &CVec) -> f64 {
        match self {
            Constraint::Diagonal(g) => g.iter().zip(v.iter()).map(|(e, z)| e * z.norm_sqr()).sum(),
            Constraint::Dense(g) => v.dotc(&(*g * v)).re,
        }
    }

    fn min_max(&self) -> (f64, f64) {
        match self {
            Constraint::Diagonal(g) => g
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))),
            Constraint::Dense(g) => {
                let e = eigh(g);
                (e.min(), e.max())
            }
        }
    }

    fn shifted(&self, m: &CMat, lambda: f64) -> CMat {
        match self {
            Constraint::Diagonal(g) => {
                let mut out = m.clone();
                for (i, e) in g.iter().enumerate() {
                    out[(i, i)] -= C64::new(lambda * e, 0.0);
                }
                out
            }
            Constraint::Dense(g) => m - *g * C64::new(lambda, 0.0),
        }
    }

    fn compressed(&self, b: &CMat) -> CMat {
        match self {
            Constraint::Diagonal(g) => {
                let mut gb = b.clone();
                for (i, e) in g.iter().enumerate() {
                    for v in gb.row_mut(i).iter_mut() {
                        *v *= *e;
                    }
                }
                b.adjoint() * gb
            }
            Constraint::Dense(g) => b.adjoint() * *g * b,
        }
    }
}

/// Dual function value and the extreme-energy vectors of its top eigenspace.
struct DualPoint {
    lambda: f64,
    g: f64,
    /// Top-block vector of least energy and that energy.
    v_min: CVec,
    e_min: f64,
    v_max: CVec,
    e_max: f64,
    /// Orthonormal basis of the top eigenspace.
    block: CMat,
}

fn evaluate(m: &CMat, c: Constraint<'_>, e: f64, lambda: f64, scale: f64) -> DualPoint {
    let eig = eigh(&c.shifted(m, lambda));
    let top = eig.max();
    let n = eig.dim();
    let tol = 1e-12 * scale;
    let mut start = n - 1;
    while start > 0 && top - eig.values[start - 1] <= tol {
        start -= 1;
    }
    let (v_min, e_min, v_max, e_max) = block_energy_extremes(&eig, start, c);
    DualPoint {
        lambda,
        g: lambda * e + top,
        v_min,
        e_min,
        v_max,
        e_max,
        block: eig.vectors.columns(start, n - start).into_owned(),
    }
}

fn block_energy_extremes(eig: &HermitianEigen, start: usize, c: Constraint<'_>) -> (CVec, f64, CVec, f64) {
    let n = eig.dim();
    if start == n - 1 {
        let v = eig.vector(n - 1);
        let en = c.energy(&v);
        return (v.clone(), en, v, en);
    }
    let b = eig.vectors.columns(start, n - start).into_owned();
    let ge = eigh(&c.compressed(&b));
    let k = ge.dim();
    let v_min = (&b * ge.vectors.column(0)).normalize();
    let v_max = (&b * ge.vectors.column(k - 1)).normalize();
    let e_min = c.energy(&v_min);
    let e_max = c.energy(&v_max);
    (v_min, e_min, v_max, e_max)
}

/// `sup Tr(Mρ)` over states with `Tr(G_c ρ) ≤ E`, for a dense constraint operator.
pub fn max_linear_objective(m: &CMat, g_constraint: &CMat, e: f64) -> Result<NormResult> {
    if !g_constraint.is_square() || !is_hermitian(g_constraint) {
        return invalid("constraint operator must be Hermitian");
    }
    if crate::linalg::is_diagonal(g_constraint) {
        let diag: Vec<f64> = (0..g_constraint.nrows()).map(|i| g_constraint[(i, i)].re).collect();
        solve(m, Constraint::Diagonal(&diag), e)
    } else {
        solve(m, Constraint::Dense(g_constraint), e)
    }
}

/// [`max_linear_objective`] for a constraint diagonal in the computational basis.
pub fn max_linear_objective_diag(m: &CMat, g_diag: &[f64], e: f64) -> Result<NormResult> {
    solve(m, Constraint::Diagonal(g_diag), e)
}

pub fn solve(m: &CMat, c: Constraint<'_>, e: f64) -> Result<NormResult> {
    if !(e > 0.0 && e.is_finite()) {
        return invalid(format!("energy budget must be positive and finite, got {e}"));
    }
    if !m.is_square() || m.nrows() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: m.nrows(),
        });
    }
    if !is_hermitian(m) {
        return invalid("objective must be Hermitian");
    }
    let (g_min, g_max) = c.min_max();
    if g_min >= e {
        return invalid(format!(
            "no state meets the budget: ground energy {g_min} ≥ E = {e}"
        ));
    }

    let eig_m = eigh(m);
    let scale = eig_m.values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let at_zero = evaluate(m, c, e, 0.0, scale);
    if at_zero.e_min <= e || g_max <= e {
        return Ok(finish_pure(m, c, at_zero.v_min, 0.0, at_zero.g, 0));
    }

    let lambda_hi = (eig_m.max() - eig_m.min()) / (e - g_min) + 1.0;
    let mut lo = at_zero;
    let mut hi = evaluate(m, c, e, lambda_hi, scale);
    if hi.e_min > e {
        return Err(Error::Internal(format!(
            "dual search not bracketed: at λ = {lambda_hi} the top eigenvector energy {} exceeds E = {e}",
            hi.e_min
        )));
    }
    if hi.e_min <= e && hi.e_max >= e {
        return Ok(finish_pair(m, c, e, &hi.v_max, &hi.v_min, hi.lambda, hi.g, 0));
    }

    let mut iterations = 0;
    let mut same_side = 0i32;
    loop {
        iterations += 1;
        // Support lines g(lo) + s_lo (λ − lo) and g(hi) + s_hi (λ − hi).
        let s_lo = e - lo.e_min;
        let s_hi = e - hi.e_max;
        let best = lo.g.min(hi.g);
        let mut cross = (hi.g - lo.g + s_lo * lo.lambda - s_hi * hi.lambda) / (s_lo - s_hi);
        let lower = lo.g + s_lo * (cross - lo.lambda);
        let width = hi.lambda - lo.lambda;
        let converged = best - lower <= 1e-14 * (1.0 + best.abs())
            || width <= 1e-12 * (1.0 + hi.lambda)
            || iterations >= MAX_DUAL_ITERS;
        if converged {
            let at = if lo.g <= hi.g { lo.lambda } else { hi.lambda };
            return Ok(finish_bracket(m, c, e, &lo, &hi, at, best, iterations));
        }
        if !(cross > lo.lambda && cross < hi.lambda) || same_side.abs() >= 3 {
            cross = 0.5 * (lo.lambda + hi.lambda);
            same_side = 0;
        }
        let mid = evaluate(m, c, e, cross, scale);
        if mid.e_min <= e && mid.e_max >= e {
            return Ok(finish_pair(m, c, e, &mid.v_max, &mid.v_min, cross, mid.g, iterations));
        }
        if mid.e_min > e {
            lo = mid;
            same_side = if same_side > 0 { same_side + 1 } else { 1 };
        } else {
            hi = mid;
            same_side = if same_side < 0 { same_side - 1 } else { -1 };
        }
    }
}

fn finish_pure(m: &CMat, c: Constraint<'_>, v: CVec, lambda: f64, dual: f64, iterations: usize) -> NormResult {
    let primal = v.dotc(&(m * &v)).re;
    NormResult {
        value: primal,
        primal_value: primal,
        dual_lambda: lambda,
        energy_used: c.energy(&v),
        witness: v,
        dual_value: dual,
        gap: dual - primal,
        iterations,
    }
}

/// Best pure state in `span{a, b}` where `energy(a) ≥ E ≥ energy(b)`.
#[allow(clippy::too_many_arguments)]
fn finish_pair(
    m: &CMat,
    c: Constraint<'_>,
    e: f64,
    a: &CVec,
    b: &CVec,
    lambda: f64,
    dual: f64,
    iterations: usize,
) -> NormResult {
    let v = best_in_span(m, c, e, a, b);
    finish_pure(m, c, v, lambda, dual, iterations)
}

/// Recovery from the two ends of a converged bracket. With degenerate top
/// blocks the extreme-energy vectors of the two ends can be unrelated (for
/// `A ⊗ I` they may sit in different copies), so pairs aligned by projecting
/// one end onto the other block are tried as well.
#[allow(clippy::too_many_arguments)]
fn finish_bracket(
    m: &CMat,
    c: Constraint<'_>,
    e: f64,
    lo: &DualPoint,
    hi: &DualPoint,
    lambda: f64,
    dual: f64,
    iterations: usize,
) -> NormResult {
    let project = |block: &CMat, v: &CVec| {
        let p = block * (block.adjoint() * v);
        let n = p.norm();
        (n > 1e-8).then(|| p.unscale(n))
    };
    let mut pairs = vec![(lo.v_min.clone(), hi.v_max.clone())];
    if lo.block.ncols() > 1 || hi.block.ncols() > 1 {
        if let Some(b) = project(&hi.block, &lo.v_min) {
            pairs.push((lo.v_min.clone(), b));
        }
        if let Some(a) = project(&lo.block, &hi.v_max) {
            pairs.push((a, hi.v_max.clone()));
        }
    }
    pairs
        .iter()
        .map(|(a, b)| finish_pair(m, c, e, a, b, lambda, dual, iterations))
        .max_by(|x, y| x.primal_value.total_cmp(&y.primal_value))
        .expect("at least one pair")
}

fn best_in_span(m: &CMat, c: Constraint<'_>, e: f64, a: &CVec, b: &CVec) -> CVec {
    // Orthonormal basis of span{a, b}; b is feasible and comes first.
    let b1 = b.normalize();
    let mut w = a - &b1 * b1.dotc(a);
    if w.norm() <= 1e-12 {
        return b1;
    }
    // Second pass: a and b are often nearly parallel near the optimum.
    w -= &b1 * b1.dotc(&w);
    let wn = w.norm();
    w.unscale_mut(wn);
    let basis = CMat::from_columns(&[b1.clone(), w]);
    let m2 = basis.adjoint() * m * &basis;
    let g2 = c.compressed(&basis);
    let (_, mv) = pauli(&m2);
    let (g0, gv) = pauli(&g2);
    let cap = e - g0;
    let gn = norm3(gv);
    let mn = norm3(mv);
    let r = if mn == 0.0 {
        // Objective constant on the span.
        return b1;
    } else {
        let mhat = scale3(mv, 1.0 / mn);
        if gn == 0.0 || dot3(gv, mhat) <= cap {
            mhat
        } else {
            let ghat = scale3(gv, 1.0 / gn);
            let h = (cap / gn).clamp(-1.0, 1.0);
            let perp = sub3(mhat, scale3(ghat, dot3(mhat, ghat)));
            let pn = norm3(perp);
            let radial = (1.0 - h * h).max(0.0).sqrt();
            if pn == 0.0 {
                add3(scale3(ghat, h), scale3(any_perpendicular(ghat), radial))
            } else {
                add3(scale3(ghat, h), scale3(perp, radial / pn))
            }
        }
    };
    // Spinor of the Bloch vector, from the better-conditioned pole.
    let coeff = if r[2] >= 0.0 {
        [C64::new(1.0 + r[2], 0.0), C64::new(r[0], r[1])]
    } else {
        [C64::new(r[0], -r[1]), C64::new(1.0 - r[2], 0.0)]
    };
    let v = (&basis * CVec::from_column_slice(&coeff)).normalize();
    // Fall back to the feasible end if rounding pushed the vector over budget.
    if c.energy(&v) > e + 1e-12 * (1.0 + e) {
        return b1;
    }
    v
}

/// `H = h0 I + hx σx + hy σy + hz σz` so that `⟨ψ|H|ψ⟩ = h0 + h·r`.
fn pauli(h: &CMat) -> (f64, [f64; 3]) {
    let h0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let off = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    (h0, [off.re, -off.im, 0.5 * (h[(0, 0)].re - h[(1, 1)].re)])
}

fn any_perpendicular(u: [f64; 3]) -> [f64; 3] {
    let axis = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let p = sub3(axis, scale3(u, dot3(axis, u)));
    scale3(p, 1.0 / norm3(p))
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// `‖A‖_E = sup √Tr(AρA*)` over states with `Tr(ρG) ≤ E`.
///
/// The gap is reported on the squared scale.
pub fn enorm(a: &CMat, g: &DiscreteOperator, e: f64) -> Result<NormResult> {
    crate::error::check_dim(g.dim(), a.nrows())?;
    if !a.is_square() {
        return invalid("operator must be square");
    }
    let mut res = max_linear_objective_diag(&gram(a), g.eigenvalues(), e)?;
    res.value = res.primal_value.max(0.0).sqrt();
    Ok(res)
}

/// `sup Σ_k Tr(V_k ρ V_k*)` over states with `Tr(ρG) ≤ E` (not square-rooted).
pub fn family_norm(v: &[MatrixOperator], g: &DiscreteOperator, e: f64) -> Result<NormResult> {
    let Some(first) = v.first() else {
        return invalid("empty operator family");
    };
    let d = first.dim();
    crate::error::check_dim(g.dim(), d)?;
    let mut m = CMat::zeros(d, d);
    for vk in v {
        crate::error::check_dim(d, vk.dim())?;
        m += gram(vk);
    }
    max_linear_objective_diag(&m, g.eigenvalues(), e)
}

/// `A* A`, symmetrized.
pub(crate) fn gram(a: &CMat) -> CMat {
    let m = a.adjoint() * a;
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Grid search over pure states (`d ≤ 3`), an independent check of [`enorm`].
///
/// For `d = 2` a 1000 × 1000 angle/phase grid plus the exact constraint
/// boundary is used; for `d = 3` a 40⁴ grid plus the boundary.
pub fn enorm_brute(a: &CMat, g: &DiscreteOperator, e: f64) -> Result<f64> {
    if !(e > 0.0) {
        return invalid("energy budget must be positive");
    }
    crate::error::check_dim(g.dim(), a.nrows())?;
    let m = gram(a);
    let ev = g.eigenvalues();
    let quad = |psi: &[C64]| -> f64 {
        let mut s = 0.0;
        for j in 0..psi.len() {
            for k in 0..psi.len() {
                s += (psi[j].conj() * m[(j, k)] * psi[k]).re;
            }
        }
        s
    };
    let tau = std::f64::consts::TAU;
    let mut best = f64::NEG_INFINITY;
    match g.dim() {
        2 => {
            let n = 1000;
            let mut thetas: Vec<f64> = (0..=n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect();
            if ev[1] > e {
                thetas.push(2.0 * (e / ev[1]).sqrt().asin());
            }
            for &th in &thetas {
                let (s, cth) = ((th / 2.0).sin(), (th / 2.0).cos());
                if ev[1] * s * s > e * (1.0 + 1e-14) {
                    continue;
                }
                for j in 0..n {
                    let ph = tau * j as f64 / n as f64;
                    let psi = [C64::new(cth, 0.0), C64::from_polar(s, ph)];
                    best = best.max(quad(&psi));
                }
            }
        }
        3 => {
            let n = 40;
            let half_pi = std::f64::consts::FRAC_PI_2;
            for ib in 0..=n {
                let bb = half_pi * ib as f64 / n as f64;
                let level = ev[1] * bb.cos().powi(2) + ev[2] * bb.sin().powi(2);
                let mut alphas: Vec<f64> = (0..=n).map(|i| half_pi * i as f64 / n as f64).collect();
                if level > e {
                    alphas.push((e / level).sqrt().asin());
                }
                for &al in &alphas {
                    let sa = al.sin();
                    if level * sa * sa > e * (1.0 + 1e-14) {
                        continue;
                    }
                    for i1 in 0..n {
                        for i2 in 0..n {
                            let p1 = tau * i1 as f64 / n as f64;
                            let p2 = tau * i2 as f64 / n as f64;
                            let psi = [
                                C64::new(al.cos(), 0.0),
                                C64::from_polar(sa * bb.cos(), p1),
                                C64::from_polar(sa * bb.sin(), p2),
                            ];
                            best = best.max(quad(&psi));
                        }
                    }
                }
            }
        }
        d => return Err(Error::Unsupported(format!("enorm_brute supports d ≤ 3, got {d}"))),
    }
    Ok(best.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_function;
    use crate::random::{random_hermitian, rng};
    use approx::assert_abs_diff_eq;

    fn number(d: usize) -> DiscreteOperator {
        DiscreteOperator::number(d).unwrap()
    }

    fn gmat(g: &DiscreteOperator) -> CMat {
        g.matrix().into_matrix()
    }

    #[test]
    fn identity_objective() {
        let g = number(4);
        let r = enorm(&CMat::identity(4, 4), &g, 0.3).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert!(r.gap.abs() <= 1e-12);
    }

    #[test]
    fn sqrt_g_has_norm_sqrt_e() {
        let g = number(4);
        let a = hermitian_function(&gmat(&g), f64::sqrt).unwrap();
        let r = enorm(&a, &g, 2.0).unwrap();
        assert_abs_diff_eq!(r.value, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn g_squared_uses_mixture_value() {
        let g = number(4);
        let m = gmat(&g) * gmat(&g);
        let r = max_linear_objective(&m, &gmat(&g), 1.0).unwrap();
        assert_abs_diff_eq!(r.primal_value, 3.0, epsilon = 1e-10);
        assert!(r.energy_used <= 1.0 + 1e-10);
        assert!(r.gap >= -1e-10 && r.gap <= 1e-9);
        let r = enorm(&gmat(&g), &g, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, 3f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn inactive_constraint_gives_zero_multiplier() {
        let g = number(3);
        let m = MatrixOperator::from_real_diagonal(&[5.0, 1.0, 2.0]).into_matrix();
        let r = max_linear_objective(&m, &gmat(&g), 0.5).unwrap();
        assert_eq!(r.dual_lambda, 0.0);
        assert_abs_diff_eq!(r.primal_value, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn negative_ground_diagonal_is_bracketed() {
        // M_00 < 0 would break a bracket of λ_max(M)/E + 1.
        let g = number(3);
        let m = MatrixOperator::from_real_diagonal(&[-10.0, 0.0, 1.0]).into_matrix();
        let r = max_linear_objective(&m, &gmat(&g), 0.5).unwrap();
        // Best is half weight on |1⟩: value -5.
        assert_abs_diff_eq!(r.primal_value, -5.0, epsilon = 1e-9);
        assert!(r.gap.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_budget_and_shapes() {
        let g = number(3);
        assert!(enorm(&CMat::identity(3, 3), &g, 0.0).is_err());
        assert!(enorm(&CMat::identity(3, 3), &g, -1.0).is_err());
        assert!(matches!(
            enorm(&CMat::identity(2, 2), &g, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_instances_are_certified() {
        let mut r = rng(21);
        for d in [2, 5, 9, 16] {
            let g = number(d);
            for &e in &[0.5, 1.0, 4.0] {
                let m = random_hermitian(&mut r, d);
                let res = max_linear_objective(&m, &gmat(&g), e).unwrap();
                assert!(res.gap >= -1e-10, "gap {} excess {} lam {} it {}", res.gap, res.energy_used - e, res.dual_lambda, res.iterations);
                assert!(res.gap <= 1e-7 * (1.0 + res.primal_value.abs()), "gap {}", res.gap);
                assert!(res.energy_used <= e + 1e-8);
                let direct = res.witness.dotc(&(&m * &res.witness)).re;
                assert_abs_diff_eq!(direct, res.primal_value, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn dense_constraint_matches_diagonal() {
        let mut r = rng(2);
        let g = number(5);
        let u = crate::random::random_unitary(&mut r, 5);
        let m = random_hermitian(&mut r, 5);
        let base = max_linear_objective(&m, &gmat(&g), 1.3).unwrap();
        let rot = max_linear_objective(&(&u * &m * u.adjoint()), &(&u * gmat(&g) * u.adjoint()), 1.3).unwrap();
        assert_abs_diff_eq!(base.primal_value, rot.primal_value, epsilon = 1e-9);
    }

    #[test]
    fn family_norm_examples() {
        let g = number(2);
        let x = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let v = MatrixOperator::new(x * C64::new(0.7f64.sqrt(), 0.0)).unwrap();
        let r = family_norm(&[v], &g, 0.4).unwrap();
        assert_abs_diff_eq!(r.value, 0.7, epsilon = 1e-12);
        let r = family_norm(&[MatrixOperator::identity(2)], &g, 0.4).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn brute_agrees_on_qubits() {
        let mut r = rng(33);
        let g = DiscreteOperator::custom(vec![0.0, 1.5]).unwrap();
        for _ in 0..3 {
            let a = random_hermitian(&mut r, 2);
            let exact = enorm(&a, &g, 0.6).unwrap().value;
            let brute = enorm_brute(&a, &g, 0.6).unwrap();
            assert!(brute <= exact + 1e-9);
            assert!((exact - brute).abs() < 2e-3);
        }
        assert_abs_diff_eq!(enorm_brute(&CMat::identity(2, 2), &g, 0.6).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn brute_agrees_on_qutrits() {
        let mut r = rng(34);
        let g = number(3);
        let a = random_hermitian(&mut r, 3);
        let exact = enorm(&a, &g, 0.8).unwrap().value;
        let brute = enorm_brute(&a, &g, 0.8).unwrap();
        assert!(brute <= exact + 1e-9);
        assert!((exact - brute).abs() < 1e-2 * (1.0 + exact));
        assert!(matches!(enorm_brute(&CMat::identity(4, 4), &number(4), 1.0), Err(Error::Unsupported(_))));
    }
}
