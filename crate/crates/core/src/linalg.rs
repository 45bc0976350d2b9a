//! Dense complex linear algebra on small truncated Hilbert spaces.
//!
//! Everything here works on column-major `nalgebra` matrices. Operators on a
//! bipartite space `A ⊗ R` use the Kronecker ordering `index = a * d_R + r`,
//! and operators are vectorized by stacking columns, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, invalid, Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Relative tolerance for the Hermitian flag of a [`MatrixOperator`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues closer than this (relative to the spectral scale) form one block.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Square complex matrix acting on a truncated Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator(CMat);

impl MatrixOperator {
    pub fn new(entries: CMat) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return invalid(format!(
                "matrix is {}x{}, expected square",
                entries.nrows(),
                entries.ncols()
            ));
        }
        if entries.nrows() == 0 {
            return invalid("matrix dimension must be positive");
        }
        if let Some((i, j)) = first_non_finite(&entries) {
            return invalid(format!("non-finite entry at ({i}, {j})"));
        }
        Ok(Self(entries))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMat::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMat::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        Self(CMat::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `max |M_jk − conj(M_kj)|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.0)
    }

    /// Hermitian within `1e-12 · (1 + max |entry|)`.
    pub fn is_hermitian(&self) -> bool {
        is_hermitian(&self.0)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            invalid(format!(
                "matrix is not Hermitian (defect {:.3e})",
                self.hermitian_defect()
            ))
        }
    }

    /// True if all off-diagonal entries are exactly zero.
    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.0)
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn kron(&self, other: &MatrixOperator) -> MatrixOperator {
        Self(self.0.kronecker(&other.0))
    }

    /// Integer matrix power; `pow(0)` is the identity.
    pub fn pow(&self, n: u32) -> MatrixOperator {
        let mut out = CMat::identity(self.dim(), self.dim());
        for _ in 0..n {
            out = &out * &self.0;
        }
        Self(out)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

impl Deref for MatrixOperator {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.0
    }
}

impl From<MatrixOperator> for CMat {
    fn from(m: MatrixOperator) -> CMat {
        m.0
    }
}

/// Positive semidefinite operator with trace in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    entries: CMat,
    trace: f64,
}

impl DensityOperator {
    /// Validates Hermiticity (1e-12), positivity (min eigenvalue ≥ −1e-10)
    /// and the trace range.
    pub fn new(entries: CMat) -> Result<Self> {
        let m = MatrixOperator::new(entries)?;
        if hermitian_defect(&m) > 1e-12 {
            return invalid("density operator is not Hermitian");
        }
        let eig = eigh(&m);
        if eig.values[0] < -1e-10 {
            return invalid(format!(
                "density operator has negative eigenvalue {:.3e}",
                eig.values[0]
            ));
        }
        let trace = m.trace().re;
        if !(trace > 0.0 && trace <= 1.0 + 1e-12) {
            return invalid(format!("trace {trace} outside (0, 1]"));
        }
        Ok(Self {
            entries: m.into_matrix(),
            trace,
        })
    }

    /// `|ψ⟩⟨ψ|`; the trace is `‖ψ‖²`, which must lie in `(0, 1]`.
    pub fn from_pure(psi: &CVec) -> Result<Self> {
        let norm2 = psi.norm_squared();
        if !(norm2 > 0.0 && norm2 <= 1.0 + 1e-12) {
            return invalid(format!("squared norm {norm2} outside (0, 1]"));
        }
        Ok(Self {
            entries: psi * psi.adjoint(),
            trace: norm2,
        })
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` for unit vectors and nonnegative weights.
    pub fn from_mixture(parts: &[(f64, CVec)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return invalid("empty mixture");
        };
        let d = first.len();
        let mut out = CMat::zeros(d, d);
        let mut trace = 0.0;
        for (w, v) in parts {
            check_dim(d, v.len())?;
            if *w < 0.0 {
                return invalid("negative mixture weight");
            }
            out += v * v.adjoint() * C64::new(*w, 0.0);
            trace += w * v.norm_squared();
        }
        if !(trace > 0.0 && trace <= 1.0 + 1e-12) {
            return invalid(format!("trace {trace} outside (0, 1]"));
        }
        Ok(Self {
            entries: out,
            trace,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }
}

impl Deref for DensityOperator {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.entries
    }
}

/// Spectral decomposition `M = U diag(values) U*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, k: usize) -> CVec {
        self.vectors.column(k).into_owned()
    }

    /// `U diag(f(λ)) U*` for a real function.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<CMat> {
        let mut fv = Vec::with_capacity(self.dim());
        for &l in &self.values {
            let y = f(l);
            if !y.is_finite() {
                return Err(Error::Domain { eigenvalue: l });
            }
            fv.push(C64::new(y, 0.0));
        }
        Ok(self.reassemble(&fv))
    }

    /// `U diag(f(λ)) U*` for a complex-valued function.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> Result<CMat> {
        let mut fv = Vec::with_capacity(self.dim());
        for &l in &self.values {
            let y = f(l);
            if !(y.re.is_finite() && y.im.is_finite()) {
                return Err(Error::Domain { eigenvalue: l });
            }
            fv.push(y);
        }
        Ok(self.reassemble(&fv))
    }

    fn reassemble(&self, fv: &[C64]) -> CMat {
        let mut scaled = self.vectors.clone();
        for (k, &y) in fv.iter().enumerate() {
            scaled.column_mut(k).scale_mut(1.0);
            for v in scaled.column_mut(k).iter_mut() {
                *v *= y;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Indices of eigenvalues within the degeneracy tolerance of the largest.
    pub fn top_block(&self) -> std::ops::Range<usize> {
        let n = self.dim();
        let scale = self
            .values
            .iter()
            .fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let top = self.max();
        let mut start = n - 1;
        while start > 0 && top - self.values[start - 1] <= DEGENERACY_TOL * scale {
            start -= 1;
        }
        start..n
    }
}

/// Eigendecomposition of a Hermitian matrix (the input is symmetrized first).
///
/// Eigenvectors inside a degenerate block are re-orthonormalized.
pub fn eigh(m: &CMat) -> HermitianEigen {
    let n = m.nrows();
    if is_diagonal(m) {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re));
        let values = idx.iter().map(|&i| m[(i, i)].re).collect();
        let mut vectors = CMat::zeros(n, n);
        for (k, &i) in idx.iter().enumerate() {
            vectors[(i, k)] = ONE;
        }
        return HermitianEigen { values, vectors };
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let se = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vectors.set_column(k, &se.eigenvectors.column(i));
    }
    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            orthonormalize_columns(&mut vectors, start..end);
        }
        start = end;
    }
    HermitianEigen { values, vectors }
}

fn orthonormalize_columns(v: &mut CMat, range: std::ops::Range<usize>) {
    for k in range.clone() {
        for j in range.start..k {
            let proj = v.column(j).dotc(&v.column(k));
            let cj = v.column(j).into_owned();
            let mut ck = v.column_mut(k);
            ck -= cj * proj;
        }
        let nrm = v.column(k).norm();
        if nrm > 0.0 {
            v.column_mut(k).unscale_mut(nrm);
        }
    }
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMat) -> bool {
    m.is_square() && hermitian_defect(m) <= HERMITIAN_TOL * (1.0 + max_abs(m))
}

pub fn is_diagonal(m: &CMat) -> bool {
    let n = m.nrows();
    for k in 0..m.ncols() {
        for j in 0..n {
            if j != k && m[(j, k)] != ZERO {
                return false;
            }
        }
    }
    true
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn first_non_finite(m: &CMat) -> Option<(usize, usize)> {
    for k in 0..m.ncols() {
        for j in 0..m.nrows() {
            let z = m[(j, k)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Some((j, k));
            }
        }
    }
    None
}

/// Sum of singular values. Hermitian inputs use the eigenvalues directly.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    if let Some((i, j)) = first_non_finite(m) {
        return invalid(format!("non-finite entry at ({i}, {j})"));
    }
    if m.is_square() && is_hermitian(m) {
        Ok(eigh(m).values.iter().map(|v| v.abs()).sum())
    } else {
        Ok(m.clone().singular_values().iter().sum())
    }
}

/// `U diag(f(λ_j)) U*` for Hermitian `M`.
pub fn hermitian_function(m: &CMat, f: impl Fn(f64) -> f64) -> Result<MatrixOperator> {
    if !is_hermitian(m) {
        return invalid("hermitian_function needs a Hermitian matrix");
    }
    Ok(MatrixOperator(eigh(m).map(f)?))
}

/// Complex-valued variant of [`hermitian_function`], e.g. `e^{-iAt}`.
pub fn hermitian_function_complex(
    m: &CMat,
    f: impl Fn(f64) -> C64,
) -> Result<MatrixOperator> {
    if !is_hermitian(m) {
        return invalid("hermitian_function needs a Hermitian matrix");
    }
    Ok(MatrixOperator(eigh(m).map_complex(f)?))
}

/// Which tensor factor of `A ⊗ R` to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    R,
}

/// Partial trace on `A ⊗ R`, removing `traced`.
pub fn partial_trace(m: &CMat, d_a: usize, d_r: usize, traced: Subsystem) -> Result<CMat> {
    if !m.is_square() {
        return invalid("partial_trace needs a square matrix");
    }
    check_dim(d_a * d_r, m.nrows())?;
    Ok(match traced {
        Subsystem::R => CMat::from_fn(d_a, d_a, |a, b| {
            (0..d_r).map(|r| m[(a * d_r + r, b * d_r + r)]).sum()
        }),
        Subsystem::A => CMat::from_fn(d_r, d_r, |r, s| {
            (0..d_a).map(|a| m[(a * d_r + r, a * d_r + s)]).sum()
        }),
    })
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `W = U diag(sign λ) U*` with `sign(0) = +1`.
///
/// `W` is a Hermitian contraction and `Tr(W X) = ‖X‖₁`.
pub fn sign_contraction(x: &CMat) -> Result<MatrixOperator> {
    if !x.is_square() || !is_hermitian(x) {
        return invalid("sign_contraction needs a Hermitian matrix");
    }
    let eig = eigh(x);
    Ok(MatrixOperator(eig.map(|l| if l < 0.0 { -1.0 } else { 1.0 })?))
}

/// Like [`sign_contraction`] but also returns `‖X‖₁` from the same spectrum.
pub(crate) fn sign_and_trace_norm(x: &CMat) -> (CMat, f64) {
    let eig = eigh(x);
    let tn = eig.values.iter().map(|v| v.abs()).sum();
    let w = eig
        .map(|l| if l < 0.0 { -1.0 } else { 1.0 })
        .expect("sign is finite");
    (w, tn)
}

/// Induced 1-norm (max column sum).
pub fn norm_one(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|k| m.column(k).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

const TAYLOR_DEGREE: usize = 18;

/// `exp(t L)` by scaling and squaring around a truncated Taylor series.
///
/// The squaring count `s` is the smallest with `‖tL‖₁ / 2^s ≤ 1/2`; at that
/// radius the degree-18 remainder is below `1e-20` relative.
pub fn expm_action(l: &CMat, t: f64) -> Result<CMat> {
    if !l.is_square() {
        return invalid("expm_action needs a square matrix");
    }
    if let Some((i, j)) = first_non_finite(l) {
        return invalid(format!("non-finite entry at ({i}, {j})"));
    }
    if !t.is_finite() {
        return invalid("non-finite time");
    }
    let n = l.nrows();
    let id = CMat::identity(n, n);
    if t == 0.0 {
        return Ok(id);
    }
    let scaled_norm = norm_one(l) * t.abs();
    let mut squarings = 0u32;
    while scaled_norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let x = l * C64::new(t / 2f64.powi(squarings as i32), 0.0);
    // Horner: I + X(I + X/2(I + X/3(...)))
    let mut p = id.clone();
    for j in (1..=TAYLOR_DEGREE).rev() {
        p = &id + (&x * &p) * C64::new(1.0 / j as f64, 0.0);
    }
    for _ in 0..squarings {
        p = &p * &p;
    }
    Ok(p)
}

/// Column-stacking vectorization.
pub fn vectorize(x: &CMat) -> CVec {
    CVec::from_column_slice(x.as_slice())
}

pub fn unvectorize(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

/// Matrix `Ψ[a, r] = ψ[a·d_R + r]` of a vector on `A ⊗ R`.
pub fn reshape_bipartite(psi: &CVec, d_a: usize, d_r: usize) -> CMat {
    CMat::from_fn(d_a, d_r, |a, r| psi[a * d_r + r])
}

/// `Tr(A* B)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, random_unitary, rng};
    use approx::assert_abs_diff_eq;

    fn diag(v: &[f64]) -> CMat {
        MatrixOperator::from_real_diagonal(v).into_matrix()
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&CMat::zeros(3, 3)).unwrap(), 0.0);
        assert_abs_diff_eq!(trace_norm(&diag(&[1.0, -2.0])).unwrap(), 3.0, epsilon = 1e-14);
        let mut r = rng(3);
        for d in [2, 3, 5] {
            let rho = random_density(&mut r, d);
            assert_abs_diff_eq!(trace_norm(&rho).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn trace_norm_rejects_nan() {
        let mut m = CMat::zeros(2, 2);
        m[(1, 0)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(trace_norm(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn trace_norm_non_hermitian_uses_singular_values() {
        // [[0, 2], [0, 0]] has singular values 2, 0.
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = C64::new(2.0, 0.0);
        assert_abs_diff_eq!(trace_norm(&m).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_norm_triangle_and_unitary_invariance() {
        let mut r = rng(11);
        for _ in 0..20 {
            let a = random_hermitian(&mut r, 4);
            let b = random_hermitian(&mut r, 4);
            let u = random_unitary(&mut r, 4);
            let lhs = trace_norm(&(&a + &b)).unwrap();
            assert!(lhs <= trace_norm(&a).unwrap() + trace_norm(&b).unwrap() + 1e-10);
            let rot = &u * &a * u.adjoint();
            assert_abs_diff_eq!(
                trace_norm(&rot).unwrap(),
                trace_norm(&a).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn hermitian_function_examples() {
        let f = hermitian_function(&diag(&[0.0, 1.0, 4.0]), f64::sqrt).unwrap();
        assert_abs_diff_eq!((f.as_matrix() - diag(&[0.0, 1.0, 2.0])).norm(), 0.0, epsilon = 1e-15);

        let mut r = rng(5);
        let m = random_hermitian(&mut r, 6);
        let same = hermitian_function(&m, |x| x).unwrap();
        assert!((same.as_matrix() - &m).iter().all(|z| z.norm() < 1e-12));

        let q = hermitian_function(&diag(&[0.0, 1.0]), |x| x.powf(0.25)).unwrap();
        assert_eq!(q[(0, 0)].re, 0.0f64.powf(0.25));
        assert_eq!(q[(1, 1)].re, 1.0f64.powf(0.25));
    }

    #[test]
    fn hermitian_function_domain_error_names_eigenvalue() {
        let err = hermitian_function(&diag(&[-2.0, 1.0]), f64::ln).unwrap_err();
        assert_eq!(err, Error::Domain { eigenvalue: -2.0 });
    }

    #[test]
    fn hermitian_function_is_multiplicative() {
        let mut r = rng(8);
        let m = random_hermitian(&mut r, 5);
        let f = hermitian_function(&m, f64::sin).unwrap();
        let g = hermitian_function(&m, |x| x * x + 1.0).unwrap();
        let fg = hermitian_function(&m, |x| x.sin() * (x * x + 1.0)).unwrap();
        let prod = f.as_matrix() * g.as_matrix();
        assert!((prod - fg.as_matrix()).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn eigh_orders_and_reconstructs() {
        let mut r = rng(1);
        let m = random_hermitian(&mut r, 7);
        let e = eigh(&m);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let back = e.map(|x| x).unwrap();
        assert!((back - &m).iter().all(|z| z.norm() < 1e-12));
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - CMat::identity(7, 7)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn eigh_degenerate_block_is_orthonormal() {
        let mut r = rng(2);
        let u = random_unitary(&mut r, 5);
        let m = &u * diag(&[1.0, 1.0, 1.0, 2.0, 3.0]) * u.adjoint();
        let e = eigh(&m);
        let gram = e.vectors.adjoint() * &e.vectors;
        assert!((gram - CMat::identity(5, 5)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn partial_trace_examples() {
        let mut r = rng(4);
        let ra = random_density(&mut r, 2);
        let rr = random_density(&mut r, 3);
        let prod = kron(&ra, &rr);
        let back = partial_trace(&prod, 2, 3, Subsystem::R).unwrap();
        assert!((back - &ra).iter().all(|z| z.norm() < 1e-14));
        let back_r = partial_trace(&prod, 2, 3, Subsystem::A).unwrap();
        assert!((back_r - &rr).iter().all(|z| z.norm() < 1e-14));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVec::from_vec(vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]);
        let red = partial_trace(&(&bell * bell.adjoint()), 2, 2, Subsystem::R).unwrap();
        assert!((red - diag(&[0.5, 0.5])).iter().all(|z| z.norm() < 1e-15));

        assert!(matches!(
            partial_trace(&CMat::zeros(5, 5), 2, 2, Subsystem::R),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity() {
        let mut r = rng(9);
        for _ in 0..10 {
            let rho = random_density(&mut r, 6);
            for sys in [Subsystem::A, Subsystem::R] {
                let red = partial_trace(&rho, 2, 3, sys).unwrap();
                assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
                assert!(eigh(&red).min() >= -1e-10);
            }
        }
    }

    #[test]
    fn sign_contraction_examples() {
        let w = sign_contraction(&diag(&[3.0, -1.0])).unwrap();
        assert!((w.as_matrix() - diag(&[1.0, -1.0])).iter().all(|z| z.norm() < 1e-15));

        let mut r = rng(6);
        let rho = random_density(&mut r, 4);
        let w = sign_contraction(&rho).unwrap();
        assert!((w.as_matrix() - CMat::identity(4, 4)).iter().all(|z| z.norm() < 1e-12));

        for _ in 0..10 {
            let x = random_hermitian(&mut r, 5);
            let w = sign_contraction(&x).unwrap();
            let tr = (w.as_matrix() * &x).trace().re;
            assert_abs_diff_eq!(tr, trace_norm(&x).unwrap(), epsilon = 1e-10);
            let we = eigh(&w);
            assert!(we.min() >= -1.0 - 1e-12 && we.max() <= 1.0 + 1e-12);
        }

        let mut nh = CMat::zeros(2, 2);
        nh[(0, 1)] = ONE;
        assert!(sign_contraction(&nh).is_err());
    }

    #[test]
    fn expm_examples() {
        let mut r = rng(12);
        let l = random_hermitian(&mut r, 4) * C64::new(0.0, 1.0);
        assert_eq!(expm_action(&l, 0.0).unwrap(), CMat::identity(4, 4));

        let d = diag(&[0.3, -1.2, 2.5]);
        let e = expm_action(&d, 1.7).unwrap();
        for (i, v) in [0.3f64, -1.2, 2.5].iter().enumerate() {
            assert!((e[(i, i)].re - (1.7 * v).exp()).abs() <= 1e-13 * (1.7 * v).exp());
        }

        let small = CMat::from_fn(5, 5, |i, j| C64::new(((i * 3 + j) % 4) as f64 * 0.2 - 0.3, (i as f64 - j as f64) * 0.1));
        let s = 0.4;
        let t = 0.9;
        let lhs = expm_action(&small, s + t).unwrap();
        let rhs = expm_action(&small, s).unwrap() * expm_action(&small, t).unwrap();
        assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn expm_matches_hermitian_exponential() {
        let mut r = rng(13);
        let h = random_hermitian(&mut r, 6) * C64::new(3.0, 0.0);
        let direct = expm_action(&(&h * C64::new(0.0, -1.0)), 2.0).unwrap();
        let spectral = hermitian_function_complex(&h, |x| C64::new(0.0, -2.0 * x).exp()).unwrap();
        assert!((direct - spectral.as_matrix()).iter().all(|z| z.norm() < 1e-11));
    }

    #[test]
    fn vectorization_convention() {
        let mut r = rng(14);
        let a = random_hermitian(&mut r, 3);
        let b = random_unitary(&mut r, 3);
        let x = random_hermitian(&mut r, 3);
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kron(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn matrix_operator_validation() {
        assert!(MatrixOperator::new(CMat::zeros(2, 3)).is_err());
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = C64::new(f64::INFINITY, 0.0);
        assert!(MatrixOperator::new(m).is_err());
        let op = MatrixOperator::from_real_diagonal(&[1.0, 2.0]);
        assert!(op.is_hermitian() && op.is_diagonal());
        assert_eq!(op.pow(2).real_diagonal(), vec![1.0, 4.0]);
    }

    #[test]
    fn density_operator_validation() {
        assert!(DensityOperator::new(diag(&[0.5, 0.5])).is_ok());
        assert!(DensityOperator::new(diag(&[1.5, -0.5])).is_err());
        assert!(DensityOperator::new(diag(&[0.9, 0.9])).is_err());
        let sub = DensityOperator::new(diag(&[0.3, 0.2])).unwrap();
        assert_abs_diff_eq!(sub.trace(), 0.5, epsilon = 1e-15);
    }
}
