//! Linear maps on matrices.
//!
//! A map is stored either as a dense action matrix on column-stacked operators
//! or, for maps acting entrywise as `X ↦ m ∘ X` in the computational basis, as
//! its symbol `m`. The Choi matrix, the action matrix and the channel flags are
//! derived lazily and cached.

pub mod ecd;

use std::sync::OnceLock;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::{eigh, hermitian_defect, partial_trace, unvectorize, vectorize, CMat, Subsystem, C64, ONE};

pub use ecd::{ecd_brute, ecd_lower, EcdEstimate, EcdOptions};

#[derive(Debug, Clone)]
enum Repr {
    /// `d_out² × d_in²` action on `vec(X)`.
    Dense(CMat),
    /// `Φ(X)_jk = m_jk X_jk`.
    Schur(CMat),
}

/// Tolerance-checked channel properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelFlags {
    pub hermitian_preserving: bool,
    pub completely_positive: bool,
    pub trace_preserving: bool,
}

pub const HP_TOL: f64 = 1e-10;
pub const CP_TOL: f64 = 1e-9;
pub const TP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Superoperator {
    d_in: usize,
    d_out: usize,
    repr: Repr,
    action: OnceLock<CMat>,
    choi: OnceLock<CMat>,
    hermitian_preserving: OnceLock<bool>,
    flags: OnceLock<ChannelFlags>,
}

/// Linear combinations and products of maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combine {
    Add,
    Subtract,
    /// `c Φ` (the second argument is ignored).
    Scale(f64),
    /// `Φ ∘ Ψ`.
    Compose,
}

impl Superoperator {
    fn with_repr(d_in: usize, d_out: usize, repr: Repr) -> Self {
        Self {
            d_in,
            d_out,
            repr,
            action: OnceLock::new(),
            choi: OnceLock::new(),
            hermitian_preserving: OnceLock::new(),
            flags: OnceLock::new(),
        }
    }

    pub fn from_action(action: CMat, d_in: usize, d_out: usize) -> Result<Self> {
        check_dim(d_out * d_out, action.nrows())?;
        check_dim(d_in * d_in, action.ncols())?;
        if action.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return invalid("non-finite action entry");
        }
        Ok(Self::with_repr(d_in, d_out, Repr::Dense(action)))
    }

    /// From `J = Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first.
    pub fn from_choi(choi: CMat, d_in: usize, d_out: usize) -> Result<Self> {
        check_dim(d_in * d_out, choi.nrows())?;
        check_dim(d_in * d_out, choi.ncols())?;
        let action = CMat::from_fn(d_out * d_out, d_in * d_in, |row, col| {
            let (a, b) = (row % d_out, row / d_out);
            let (i, j) = (col % d_in, col / d_in);
            choi[(a * d_in + i, b * d_in + j)]
        });
        Self::from_action(action, d_in, d_out)
    }

    /// `X ↦ Σ_k K_k X K_k*`.
    pub fn kraus(ops: &[CMat]) -> Result<Self> {
        let Some(first) = ops.first() else {
            return invalid("empty Kraus list");
        };
        let (d_out, d_in) = first.shape();
        let mut action = CMat::zeros(d_out * d_out, d_in * d_in);
        for k in ops {
            if k.shape() != (d_out, d_in) {
                return invalid("Kraus operators differ in shape");
            }
            action += k.map(|z| z.conj()).kronecker(k);
        }
        Self::from_action(action, d_in, d_out)
    }

    /// `X ↦ U X U*`.
    pub fn conjugation(u: &CMat) -> Result<Self> {
        Self::kraus(std::slice::from_ref(u))
    }

    /// `X ↦ A X B*`.
    pub fn sandwich_map(a: &CMat, b: &CMat) -> Result<Self> {
        if a.shape() != b.shape() {
            return invalid("sandwich factors differ in shape");
        }
        let (d_out, d_in) = a.shape();
        Self::from_action(b.map(|z| z.conj()).kronecker(a), d_in, d_out)
    }

    /// Entrywise multiplication by `symbol`.
    pub fn schur(symbol: CMat) -> Result<Self> {
        if !symbol.is_square() {
            return invalid("Schur symbol must be square");
        }
        if symbol.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return invalid("non-finite Schur symbol entry");
        }
        let d = symbol.nrows();
        Ok(Self::with_repr(d, d, Repr::Schur(symbol)))
    }

    pub fn identity(d: usize) -> Self {
        Self::with_repr(d, d, Repr::Schur(CMat::from_element(d, d, ONE)))
    }

    pub fn zero(d: usize) -> Self {
        Self::with_repr(d, d, Repr::Schur(CMat::zeros(d, d)))
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// The symbol if the map acts entrywise in the computational basis.
    pub fn schur_symbol(&self) -> Option<&CMat> {
        match &self.repr {
            Repr::Schur(m) => Some(m),
            Repr::Dense(_) => None,
        }
    }

    /// Action matrix on `vec(X)` (column stacking).
    pub fn action(&self) -> &CMat {
        self.action.get_or_init(|| match &self.repr {
            Repr::Dense(l) => l.clone(),
            Repr::Schur(m) => {
                let n = self.d_in * self.d_in;
                let mut l = CMat::zeros(n, n);
                for (idx, z) in m.iter().enumerate() {
                    l[(idx, idx)] = *z;
                }
                l
            }
        })
    }

    /// Choi matrix, index `a · d_in + i` for output `a`, input `i`.
    pub fn choi(&self) -> &CMat {
        self.choi.get_or_init(|| {
            let (di, dout) = (self.d_in, self.d_out);
            match &self.repr {
                Repr::Schur(m) => {
                    let mut j = CMat::zeros(dout * di, dout * di);
                    for a in 0..di {
                        for b in 0..di {
                            j[(a * di + a, b * di + b)] = m[(a, b)];
                        }
                    }
                    j
                }
                Repr::Dense(l) => CMat::from_fn(dout * di, dout * di, |r, c| {
                    let (a, i) = (r / di, r % di);
                    let (b, j) = (c / di, c % di);
                    l[(a + dout * b, i + di * j)]
                }),
            }
        })
    }

    pub fn is_hermitian_preserving(&self) -> bool {
        *self.hermitian_preserving.get_or_init(|| match &self.repr {
            Repr::Schur(m) => hermitian_defect(m) <= HP_TOL,
            Repr::Dense(_) => hermitian_defect(self.choi()) <= HP_TOL,
        })
    }

    /// Hermitian preservation, complete positivity and trace preservation.
    pub fn flags(&self) -> ChannelFlags {
        *self.flags.get_or_init(|| {
            let hermitian_preserving = self.is_hermitian_preserving();
            match &self.repr {
                Repr::Schur(m) => ChannelFlags {
                    hermitian_preserving,
                    completely_positive: hermitian_preserving && eigh(m).min() >= -CP_TOL,
                    trace_preserving: (0..self.d_in).all(|i| (m[(i, i)] - ONE).norm() <= TP_TOL),
                },
                Repr::Dense(_) => {
                    let j = self.choi();
                    let completely_positive = hermitian_preserving && eigh(j).min() >= -CP_TOL;
                    let tr_out = partial_trace(j, self.d_out, self.d_in, Subsystem::A).expect("choi shape");
                    let trace_preserving = (tr_out - CMat::identity(self.d_in, self.d_in))
                        .iter()
                        .all(|z| z.norm() <= TP_TOL);
                    ChannelFlags {
                        hermitian_preserving,
                        completely_positive,
                        trace_preserving,
                    }
                }
            }
        })
    }

    pub fn is_channel(&self) -> bool {
        let f = self.flags();
        f.completely_positive && f.trace_preserving
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        check_dim(self.d_in, x.nrows())?;
        check_dim(self.d_in, x.ncols())?;
        Ok(match &self.repr {
            Repr::Schur(m) => m.component_mul(x),
            Repr::Dense(l) => unvectorize(&(l * vectorize(x)), self.d_out, self.d_out),
        })
    }

    /// `(Φ ⊗ id_R)(ρ)` on the ordering `a · d_R + r`.
    pub fn apply_extended(&self, rho: &CMat, d_r: usize) -> Result<CMat> {
        let (di, dout) = (self.d_in, self.d_out);
        check_dim(di * d_r, rho.nrows())?;
        check_dim(di * d_r, rho.ncols())?;
        match &self.repr {
            Repr::Schur(m) => Ok(CMat::from_fn(di * d_r, di * d_r, |p, q| {
                m[(p / d_r, q / d_r)] * rho[(p, q)]
            })),
            Repr::Dense(l) => {
                // Column (r, s) holds vec of the block ρ^{rs}[a, b] = ρ[a d_R + r, b d_R + s].
                let blocks = CMat::from_fn(di * di, d_r * d_r, |idx, rs| {
                    let (a, b) = (idx % di, idx / di);
                    let (r, s) = (rs % d_r, rs / d_r);
                    rho[(a * d_r + r, b * d_r + s)]
                });
                let out_blocks = l * blocks;
                Ok(CMat::from_fn(dout * d_r, dout * d_r, |p, q| {
                    let (a, r) = (p / d_r, p % d_r);
                    let (b, s) = (q / d_r, q % d_r);
                    out_blocks[(a + dout * b, r + d_r * s)]
                }))
            }
        }
    }

    /// The Hilbert–Schmidt adjoint: `Tr(X* Φ(Y)) = Tr(Φ†(X)* Y)`.
    pub fn adjoint(&self) -> Superoperator {
        match &self.repr {
            Repr::Schur(m) => Self::with_repr(self.d_in, self.d_out, Repr::Schur(m.map(|z| z.conj()))),
            Repr::Dense(l) => Self::with_repr(self.d_out, self.d_in, Repr::Dense(l.adjoint())),
        }
    }

    pub fn combine(&self, other: &Superoperator, op: Combine) -> Result<Superoperator> {
        if let Combine::Scale(c) = op {
            let c = C64::new(c, 0.0);
            return Ok(match &self.repr {
                Repr::Schur(m) => Self::with_repr(self.d_in, self.d_out, Repr::Schur(m * c)),
                Repr::Dense(l) => Self::with_repr(self.d_in, self.d_out, Repr::Dense(l * c)),
            });
        }
        let compose = op == Combine::Compose;
        if compose {
            check_dim(self.d_in, other.d_out)?;
        } else {
            check_dim(self.d_in, other.d_in)?;
            check_dim(self.d_out, other.d_out)?;
        }
        let (d_in, d_out) = (other.d_in, self.d_out);
        if let (Repr::Schur(a), Repr::Schur(b)) = (&self.repr, &other.repr) {
            let m = match op {
                Combine::Add => a + b,
                Combine::Subtract => a - b,
                Combine::Compose => a.component_mul(b),
                Combine::Scale(_) => unreachable!(),
            };
            return Ok(Self::with_repr(d_in, d_out, Repr::Schur(m)));
        }
        let (a, b) = (self.action(), other.action());
        let l = match op {
            Combine::Add => a + b,
            Combine::Subtract => a - b,
            Combine::Compose => a * b,
            Combine::Scale(_) => unreachable!(),
        };
        Ok(Self::with_repr(d_in, d_out, Repr::Dense(l)))
    }

    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        self.combine(other, Combine::Add)
    }

    pub fn sub(&self, other: &Superoperator) -> Result<Superoperator> {
        self.combine(other, Combine::Subtract)
    }

    pub fn scale(&self, c: f64) -> Superoperator {
        self.combine(self, Combine::Scale(c)).expect("scaling never fails")
    }

    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        self.combine(other, Combine::Compose)
    }

    /// `Σ_k c_k Φ^k` for a square map, evaluated by Horner's rule.
    pub fn polynomial(&self, coeffs: &[f64]) -> Result<Superoperator> {
        if self.d_in != self.d_out {
            return invalid("polynomial needs a map with equal input and output dimension");
        }
        let d = self.d_in;
        let Some((&last, rest)) = coeffs.split_last() else {
            return Ok(Self::zero(d));
        };
        match &self.repr {
            Repr::Schur(m) => {
                let mut p = CMat::from_element(d, d, C64::new(last, 0.0));
                for &c in rest.iter().rev() {
                    p = p.component_mul(m).add_scalar(C64::new(c, 0.0));
                }
                Ok(Self::with_repr(d, d, Repr::Schur(p)))
            }
            Repr::Dense(l) => {
                let n = d * d;
                let id = CMat::identity(n, n);
                let mut p = &id * C64::new(last, 0.0);
                for &c in rest.iter().rev() {
                    p = l * p + &id * C64::new(c, 0.0);
                }
                Ok(Self::with_repr(d, d, Repr::Dense(p)))
            }
        }
    }

    /// Largest absolute entry of the action matrix.
    pub fn max_abs(&self) -> f64 {
        let m = match &self.repr {
            Repr::Schur(m) => m,
            Repr::Dense(l) => l,
        };
        m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
    }

    /// Maximum entrywise distance between action matrices.
    pub fn distance(&self, other: &Superoperator) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.max_abs())
    }
}

/// `A ρ B*`.
pub fn sandwich(a: &CMat, rho: &CMat, b: &CMat) -> Result<CMat> {
    if !rho.is_square() {
        return invalid("sandwich needs a square middle factor");
    }
    check_dim(rho.nrows(), a.ncols())?;
    check_dim(rho.nrows(), b.ncols())?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(a * rho * b.adjoint())
}
