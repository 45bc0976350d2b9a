//! Unitary groups, Gaussian dephasing semigroups and GKLS generators.
//!
//! Generators follow `d/dt Φ_t(ρ)|_{t=0}` for the conjugation
//! `ρ ↦ e^{-iAt} ρ e^{iAt}`, so the commutator generator is `−i[A, ρ]`.
//! When `A` is diagonal in the computational basis every map here acts
//! entrywise and is stored by its symbol.

mod quadrature;

pub use quadrature::gauss_hermite;

use crate::error::{check_dim, invalid, Result};
use crate::linalg::{eigh, expm_action, hermitian_function_complex, is_diagonal, is_hermitian, CMat, HermitianEigen, C64, ONE};
use crate::random::{ginibre, random_hermitian, Rng64};
use crate::superop::Superoperator;

/// Residual tolerance of the conservativity relation `Σ V*V + K + K* = 0`.
pub const CONSERVATIVITY_TOL: f64 = 1e-9;

/// Default Gauss–Hermite node count.
pub const DEFAULT_NODES: usize = 64;

/// How to evaluate the Gaussian-averaged conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianMethod {
    ClosedForm,
    Quadrature(usize),
}

/// A quantum dynamical semigroup given by its defining operators.
#[derive(Debug, Clone)]
pub enum SemigroupSpec {
    /// `ρ ↦ e^{-iAt} ρ e^{iAt}`.
    Unitary { a: CMat },
    /// Gaussian average of the unitary group with variance `t`.
    Gaussian { a: CMat },
    /// `ρ ↦ Σ V_k ρ V_k* + Kρ + ρK*`.
    Gkls { v: Vec<CMat>, k: CMat },
}

impl SemigroupSpec {
    pub fn unitary(a: CMat) -> Result<Self> {
        require_hermitian(&a)?;
        Ok(Self::Unitary { a })
    }

    pub fn gaussian(a: CMat) -> Result<Self> {
        require_hermitian(&a)?;
        Ok(Self::Gaussian { a })
    }

    pub fn gkls(v: Vec<CMat>, k: CMat) -> Result<Self> {
        conservativity_residual(&v, &k).and_then(|r| {
            if r <= CONSERVATIVITY_TOL {
                Ok(Self::Gkls { v, k })
            } else {
                invalid(format!("conservativity violated: max residual {r:.3e}"))
            }
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Unitary { a } | Self::Gaussian { a } => a.nrows(),
            Self::Gkls { k, .. } => k.nrows(),
        }
    }

    pub fn generator(&self) -> Result<Superoperator> {
        match self {
            Self::Unitary { a } => commutator_generator(a),
            Self::Gaussian { a } => gaussian_generator(a),
            Self::Gkls { v, k } => gkls_generator(v, k),
        }
    }

    /// `Φ_t`; the identity at `t = 0`.
    pub fn channel_at(&self, t: f64) -> Result<Superoperator> {
        if !(t >= 0.0 && t.is_finite()) {
            return invalid(format!("time must be nonnegative, got {t}"));
        }
        if t == 0.0 {
            return Ok(Superoperator::identity(self.dim()));
        }
        match self {
            Self::Unitary { a } => unitary_channel_at(a, t),
            Self::Gaussian { a } => gaussian_channel_at(a, t, GaussianMethod::ClosedForm),
            Self::Gkls { .. } => exp_semigroup_at(&self.generator()?, t),
        }
    }
}

fn require_hermitian(a: &CMat) -> Result<()> {
    if a.is_square() && is_hermitian(a) {
        Ok(())
    } else {
        invalid("generator operator must be Hermitian")
    }
}

/// `max |(Σ V_k* V_k + K + K*)_{jl}|`.
pub fn conservativity_residual(v: &[CMat], k: &CMat) -> Result<f64> {
    if !k.is_square() {
        return invalid("K must be square");
    }
    let d = k.nrows();
    let mut r = k + k.adjoint();
    for vk in v {
        check_dim(d, vk.nrows())?;
        check_dim(d, vk.ncols())?;
        r += vk.adjoint() * vk;
    }
    Ok(r.iter().fold(0.0_f64, |a, z| a.max(z.norm())))
}

fn diagonal_of(a: &CMat) -> Vec<f64> {
    (0..a.nrows()).map(|i| a[(i, i)].re).collect()
}

fn symbol(a: &[f64], f: impl Fn(f64) -> C64) -> CMat {
    let d = a.len();
    CMat::from_fn(d, d, |j, k| f(a[j] - a[k]))
}

/// The entrywise map with symbol `f(a_j − a_k)` in the eigenbasis of `A`.
fn eigenbasis_schur(a: &CMat, f: impl Fn(f64) -> C64) -> Result<Superoperator> {
    require_hermitian(a)?;
    if is_diagonal(a) {
        return Superoperator::schur(symbol(&diagonal_of(a), f));
    }
    let eig: HermitianEigen = eigh(a);
    rotate_schur(&symbol(&eig.values, f), &eig.vectors)
}

/// `X ↦ U (m ∘ (U* X U)) U*`.
fn rotate_schur(m: &CMat, u: &CMat) -> Result<Superoperator> {
    let d = m.nrows();
    let to_eig = u.transpose().kronecker(&u.adjoint());
    let from_eig = u.map(|z| z.conj()).kronecker(u);
    let mut scaled = to_eig;
    for (idx, z) in m.iter().enumerate() {
        for v in scaled.row_mut(idx).iter_mut() {
            *v *= *z;
        }
    }
    Superoperator::from_action(from_eig * scaled, d, d)
}

/// `ρ ↦ e^{-iAt} ρ e^{iAt}`.
pub fn unitary_channel_at(a: &CMat, t: f64) -> Result<Superoperator> {
    require_hermitian(a)?;
    if is_diagonal(a) {
        return Superoperator::schur(symbol(&diagonal_of(a), |x| C64::new(0.0, -x * t).exp()));
    }
    let u = hermitian_function_complex(a, |x| C64::new(0.0, -x * t).exp())?;
    Superoperator::conjugation(&u)
}

/// `ρ ↦ −i(Aρ − ρA)`.
pub fn commutator_generator(a: &CMat) -> Result<Superoperator> {
    require_hermitian(a)?;
    if is_diagonal(a) {
        return Superoperator::schur(symbol(&diagonal_of(a), |x| C64::new(0.0, -x)));
    }
    let d = a.nrows();
    let id = CMat::identity(d, d);
    let l = (id.kronecker(a) - a.transpose().kronecker(&id)) * C64::new(0.0, -1.0);
    Superoperator::from_action(l, d, d)
}

/// Gaussian average `(2πt)^{-1/2} ∫ e^{-iAx} ρ e^{iAx} e^{-x²/2t} dx`.
///
/// The closed form damps entry `(j, k)` in the eigenbasis of `A` by
/// `exp(−t (a_j − a_k)² / 2)`. The quadrature substitutes `x = √(2t) u`.
pub fn gaussian_channel_at(a: &CMat, t: f64, method: GaussianMethod) -> Result<Superoperator> {
    if !(t > 0.0 && t.is_finite()) {
        return invalid(format!("time must be positive, got {t}"));
    }
    match method {
        GaussianMethod::ClosedForm => eigenbasis_schur(a, |x| C64::new((-t * x * x / 2.0).exp(), 0.0)),
        GaussianMethod::Quadrature(n) => {
            if n < 20 {
                return invalid(format!("quadrature needs at least 20 nodes, got {n}"));
            }
            let (nodes, weights) = gauss_hermite(n)?;
            let s = (2.0 * t).sqrt();
            let norm = std::f64::consts::PI.sqrt();
            eigenbasis_schur(a, |x| {
                nodes
                    .iter()
                    .zip(&weights)
                    .map(|(u, w)| C64::from_polar(w / norm, -x * s * u))
                    .sum()
            })
        }
    }
}

/// `ρ ↦ AρA − ½(A²ρ + ρA²)`.
pub fn gaussian_generator(a: &CMat) -> Result<Superoperator> {
    require_hermitian(a)?;
    if is_diagonal(a) {
        return Superoperator::schur(symbol(&diagonal_of(a), |x| C64::new(-x * x / 2.0, 0.0)));
    }
    let d = a.nrows();
    let id = CMat::identity(d, d);
    let a2 = a * a;
    let half = C64::new(0.5, 0.0);
    let l = a.transpose().kronecker(a) - (id.kronecker(&a2) + a2.transpose().kronecker(&id)) * half;
    Superoperator::from_action(l, d, d)
}

/// `ρ ↦ Σ V_k ρ V_k* + Kρ + ρK*`, after checking conservativity.
pub fn gkls_generator(v: &[CMat], k: &CMat) -> Result<Superoperator> {
    let r = conservativity_residual(v, k)?;
    if r > CONSERVATIVITY_TOL {
        return invalid(format!("conservativity violated: max residual {r:.3e}"));
    }
    let d = k.nrows();
    let id = CMat::identity(d, d);
    let mut l = id.kronecker(k) + k.map(|z| z.conj()).kronecker(&id);
    for vk in v {
        l += vk.map(|z| z.conj()).kronecker(vk);
    }
    Superoperator::from_action(l, d, d)
}

/// `e^{tS}`.
pub fn exp_semigroup_at(s: &Superoperator, t: f64) -> Result<Superoperator> {
    if !(t >= 0.0 && t.is_finite()) {
        return invalid(format!("time must be nonnegative, got {t}"));
    }
    if let Some(m) = s.schur_symbol() {
        return Superoperator::schur(m.map(|z| (z * t).exp()));
    }
    if s.d_in() != s.d_out() {
        return invalid("exponential needs equal input and output dimension");
    }
    Superoperator::from_action(expm_action(s.action(), t)?, s.d_in(), s.d_out())
}

/// `Σ_{j ≤ k} (t^j / j!) S^j`.
pub fn taylor_polynomial(s: &Superoperator, t: f64, k: usize) -> Result<Superoperator> {
    let mut coeffs = Vec::with_capacity(k + 1);
    let mut c = 1.0;
    for j in 0..=k {
        if j > 0 {
            c *= t / j as f64;
        }
        coeffs.push(c);
    }
    s.polynomial(&coeffs)
}

/// Random conservative GKLS pair: `n_ops` Ginibre jump operators scaled by
/// `rate`, a random Hamiltonian, and `K = −iH − ½ Σ V*V`.
pub fn random_gkls(rng: &mut Rng64, d: usize, n_ops: usize, rate: f64) -> (Vec<CMat>, CMat) {
    let scale = C64::new((rate / d as f64).sqrt(), 0.0);
    let v: Vec<CMat> = (0..n_ops).map(|_| ginibre(rng, d, d) * scale).collect();
    let h = random_hermitian(rng, d);
    let mut k = h * C64::new(0.0, -1.0);
    for vk in &v {
        k -= vk.adjoint() * vk * C64::new(0.5, 0.0);
    }
    (v, k)
}

/// Qubit flip generator `γ(XρX − ρ)`: `V = √γ X`, `K = −(γ/2) I`.
pub fn qubit_flip(gamma: f64) -> (Vec<CMat>, CMat) {
    let zero = C64::new(0.0, 0.0);
    let x = CMat::from_row_slice(2, 2, &[zero, ONE, ONE, zero]);
    (
        vec![x * C64::new(gamma.sqrt(), 0.0)],
        CMat::identity(2, 2) * C64::new(-gamma / 2.0, 0.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::MatrixOperator;
    use crate::random::{random_density, rng};
    use approx::assert_abs_diff_eq;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    fn diag(v: &[f64]) -> CMat {
        MatrixOperator::from_real_diagonal(v).into_matrix()
    }

    fn plus_state() -> CMat {
        CMat::from_element(2, 2, C64::new(0.5, 0.0))
    }

    #[test]
    fn unitary_examples() {
        let a = diag(&[0.0, 1.0]);
        let id = unitary_channel_at(&a, 0.0).unwrap();
        assert!(close(id.action(), Superoperator::identity(2).action(), 0.0));
        let out = unitary_channel_at(&a, std::f64::consts::PI).unwrap().apply(&plus_state()).unwrap();
        assert!((out[(0, 1)] + C64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((out[(1, 0)] + C64::new(0.5, 0.0)).norm() < 1e-15);

        let mut r = rng(1);
        let h = random_hermitian(&mut r, 3);
        let l = |t| unitary_channel_at(&h, t).unwrap();
        let comp = l(0.3).compose(&l(0.4)).unwrap();
        assert!(close(comp.action(), l(0.7).action(), 1e-10));
        assert!(l(0.5).is_channel());
    }

    #[test]
    fn commutator_examples() {
        let a = diag(&[0.0, 1.0]);
        let s = commutator_generator(&a).unwrap();
        let out = s.apply(&plus_state()).unwrap();
        let expect = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, 0.5), C64::new(0.0, -0.5), C64::new(0.0, 0.0)]);
        assert!(close(&out, &expect, 1e-15));
        assert!(close(&s.apply(&diag(&[0.3, 0.7])).unwrap(), &CMat::zeros(2, 2), 0.0));

        let mut r = rng(2);
        let h = random_hermitian(&mut r, 3);
        let dense = commutator_generator(&h).unwrap();
        let rho = random_density(&mut r, 3);
        let direct = (&h * &rho - &rho * &h) * C64::new(0.0, -1.0);
        assert!(close(&dense.apply(&rho).unwrap(), &direct, 1e-13));
        assert!(dense.apply(&rho).unwrap().trace().norm() < 1e-12);
    }

    #[test]
    fn gaussian_examples() {
        let a = diag(&[0.0, 1.0]);
        let xi = gaussian_channel_at(&a, 2.0, GaussianMethod::ClosedForm).unwrap();
        let out = xi.apply(&CMat::from_element(2, 2, ONE)).unwrap();
        assert_abs_diff_eq!(out[(0, 1)].re, (-1.0f64).exp(), epsilon = 1e-15);
        let q = gaussian_channel_at(&a, 2.0, GaussianMethod::Quadrature(64)).unwrap();
        assert_abs_diff_eq!(q.apply(&CMat::from_element(2, 2, ONE)).unwrap()[(0, 1)].re, 0.367879441171, epsilon = 1e-11);
        assert!(gaussian_channel_at(&a, 0.0, GaussianMethod::ClosedForm).is_err());
        assert!(gaussian_channel_at(&a, 1.0, GaussianMethod::Quadrature(10)).is_err());

        let d = diag(&[0.2, 0.8]);
        assert!(close(&xi.apply(&d).unwrap(), &d, 0.0));

        let mut r = rng(3);
        let h = random_hermitian(&mut r, 4);
        for t in [0.1, 1.0, 2.0] {
            let c = gaussian_channel_at(&h, t, GaussianMethod::ClosedForm).unwrap();
            let q = gaussian_channel_at(&h, t, GaussianMethod::Quadrature(64)).unwrap();
            assert!(c.distance(&q).unwrap() <= 1e-8);
            assert!(c.is_channel());
        }
    }

    #[test]
    fn gaussian_generator_examples() {
        let a = diag(&[0.0, 1.0]);
        let z = gaussian_generator(&a).unwrap();
        let out = z.apply(&CMat::from_element(2, 2, ONE)).unwrap();
        assert_abs_diff_eq!(out[(0, 1)].re, -0.5, epsilon = 1e-15);
        assert!(close(&z.apply(&diag(&[0.3, 0.7])).unwrap(), &CMat::zeros(2, 2), 0.0));

        let mut r = rng(4);
        let h = random_hermitian(&mut r, 3);
        let z = gaussian_generator(&h).unwrap();
        let s = commutator_generator(&h).unwrap();
        let half_sq = s.compose(&s).unwrap().scale(0.5);
        assert!(close(z.action(), half_sq.action(), 1e-12));
    }

    #[test]
    fn gkls_examples() {
        let (v, k) = qubit_flip(0.7);
        let s = gkls_generator(&v, &k).unwrap();
        let mut r = rng(5);
        let rho = random_density(&mut r, 2);
        let x = &v[0] / C64::new(0.7f64.sqrt(), 0.0);
        let expect = (&x * &rho * &x - &rho) * C64::new(0.7, 0.0);
        assert!(close(&s.apply(&rho).unwrap(), &expect, 1e-14));

        let bad = CMat::identity(2, 2) * C64::new(-0.1, 0.0);
        let err = gkls_generator(&v, &bad).unwrap_err();
        assert!(format!("{err}").contains("residual"));

        let (v, k) = random_gkls(&mut r, 3, 2, 1.0);
        let s = gkls_generator(&v, &k).unwrap();
        let rho = random_density(&mut r, 3);
        assert!(s.apply(&rho).unwrap().trace().norm() <= 1e-10);
        for t in [0.1, 1.0] {
            let ch = exp_semigroup_at(&s, t).unwrap();
            assert!(ch.is_channel());
        }
    }

    #[test]
    fn exponentials_match_closed_forms() {
        let mut r = rng(6);
        let h = random_hermitian(&mut r, 4);
        for t in [0.2, 1.0] {
            let e1 = exp_semigroup_at(&commutator_generator(&h).unwrap(), t).unwrap();
            assert!(e1.distance(&unitary_channel_at(&h, t).unwrap()).unwrap() <= 1e-9);
            let e2 = exp_semigroup_at(&gaussian_generator(&h).unwrap(), t).unwrap();
            let c = gaussian_channel_at(&h, t, GaussianMethod::ClosedForm).unwrap();
            assert!(e2.distance(&c).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn taylor_examples() {
        let mut r = rng(7);
        let h = random_hermitian(&mut r, 3);
        let s = commutator_generator(&h).unwrap();
        let p0 = taylor_polynomial(&s, 0.4, 0).unwrap();
        assert!(close(p0.action(), Superoperator::identity(3).action(), 0.0));
        let p1 = taylor_polynomial(&s, 0.4, 1).unwrap();
        let manual = Superoperator::identity(3).add(&s.scale(0.4)).unwrap();
        assert!(close(p1.action(), manual.action(), 1e-15));
        let p30 = taylor_polynomial(&s, 0.4, 30).unwrap();
        assert!(p30.distance(&unitary_channel_at(&h, 0.4).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let mut r = rng(8);
        let g = crate::random::ginibre(&mut r, 2, 2);
        assert!(SemigroupSpec::unitary(g.clone()).is_err());
        let h = random_hermitian(&mut r, 2);
        let spec = SemigroupSpec::gaussian(h).unwrap();
        assert_eq!(spec.dim(), 2);
        assert!(close(spec.channel_at(0.0).unwrap().action(), Superoperator::identity(2).action(), 0.0));
        let (v, k) = qubit_flip(1.0);
        assert!(SemigroupSpec::gkls(v.clone(), k).is_ok());
        assert!(SemigroupSpec::gkls(v, CMat::zeros(2, 2)).is_err());
    }
}
