//! The reference energy observable and operator families built from it.

use serde::{Deserialize, Serialize};

use crate::enorm::enorm;
use crate::error::{invalid, Error, Result};
use crate::linalg::{CMat, CVec, DensityOperator, MatrixOperator, C64};
use crate::random::{gaussian_vector, rng};

/// Positive operator diagonal in the computational basis with nondecreasing
/// eigenvalues `0 = E_0 ≤ E_1 ≤ …`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    eigenvalues: Vec<f64>,
}

impl DiscreteOperator {
    /// Number operator `diag(0, 1, …, dim − 1)`.
    pub fn number(dim: usize) -> Result<Self> {
        Self::custom((0..dim).map(|k| k as f64).collect())
    }

    pub fn custom(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return invalid(format!("dimension must be at least 2, got {}", eigenvalues.len()));
        }
        if eigenvalues[0] != 0.0 {
            return invalid(format!("ground eigenvalue must be 0, got {}", eigenvalues[0]));
        }
        for (k, w) in eigenvalues.windows(2).enumerate() {
            if !w[1].is_finite() || w[1] < w[0] {
                return invalid(format!(
                    "eigenvalues must be finite and nondecreasing (index {})",
                    k + 1
                ));
            }
        }
        Ok(Self { eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("dim ≥ 2")
    }

    pub fn matrix(&self) -> MatrixOperator {
        MatrixOperator::from_real_diagonal(&self.eigenvalues)
    }

    /// `G ⊗ I_R` on the composite ordering `a · d_R + r`.
    pub fn kron_identity(&self, d_r: usize) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|&e| std::iter::repeat_n(e, d_r))
            .collect()
    }

    /// Operator function of `G` from a named family.
    pub fn family(&self, family: Family) -> Result<MatrixOperator> {
        let diag = family.apply(&self.eigenvalues)?;
        Ok(MatrixOperator::from_real_diagonal(&diag))
    }

    /// `Tr(ρ_A G)` where `ρ` lives on `A` or on `A ⊗ R` (with `d_R` inferred).
    pub fn energy(&self, rho: &CMat) -> Result<f64> {
        let d = self.dim();
        let n = rho.nrows();
        if n == 0 || !n.is_multiple_of(d) || !rho.is_square() {
            return Err(Error::DimensionMismatch { expected: d, found: n });
        }
        let d_r = n / d;
        let mut total = 0.0;
        for (a, &e) in self.eigenvalues.iter().enumerate() {
            for r in 0..d_r {
                total += e * rho[(a * d_r + r, a * d_r + r)].re;
            }
        }
        Ok(total)
    }

    /// Energy of `|ψ⟩⟨ψ|` for `ψ` on `A` or `A ⊗ R`.
    pub fn energy_of_vector(&self, psi: &CVec) -> Result<f64> {
        let d = self.dim();
        let n = psi.len();
        if n == 0 || !n.is_multiple_of(d) {
            return Err(Error::DimensionMismatch { expected: d, found: n });
        }
        let d_r = n / d;
        Ok(psi
            .iter()
            .enumerate()
            .map(|(i, z)| self.eigenvalues[i / d_r] * z.norm_sqr())
            .sum())
    }
}

/// Operator functions `f(G)` evaluated on the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `G^α` with `0^0 = 1`.
    Power { alpha: f64 },
    /// `√(ln max(G, 1))`.
    SqrtLog,
    /// `(ln max(G, 1))^β`.
    LogPower { beta: f64 },
}

impl Family {
    pub fn apply(&self, eigenvalues: &[f64]) -> Result<Vec<f64>> {
        match *self {
            Family::Power { alpha } => {
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return invalid(format!("power exponent must be nonnegative, got {alpha}"));
                }
                Ok(eigenvalues
                    .iter()
                    .map(|&e| if alpha == 0.0 { 1.0 } else { e.powf(alpha) })
                    .collect())
            }
            Family::SqrtLog => Ok(eigenvalues.iter().map(|&e| clamped_ln(e).sqrt()).collect()),
            Family::LogPower { beta } => {
                if !(beta > 0.0 && beta.is_finite()) {
                    return invalid(format!("log power must be positive, got {beta}"));
                }
                Ok(eigenvalues.iter().map(|&e| clamped_ln(e).powf(beta)).collect())
            }
        }
    }
}

fn clamped_ln(e: f64) -> f64 {
    e.max(1.0).ln()
}

const BLEND_STEPS: usize = 20;

/// Random unit vector with `Tr(ρG) ≤ E`, as a state vector.
///
/// A Gaussian random vector is accepted if feasible; otherwise it is blended
/// toward its (normalized) projection on the ground space of `g`, with the
/// blend weight found by binary search. The diagonal `g` may be a composite
/// constraint such as `G ⊗ I_R`.
pub fn sample_constrained_vector(g: &[f64], e: f64, seed: u64) -> CVec {
    let mut r = rng(seed);
    let v = gaussian_vector(&mut r, g.len()).normalize();
    blend_to_budget(g, e, v)
}

pub(crate) fn blend_to_budget(g: &[f64], e: f64, v: CVec) -> CVec {
    let energy = |w: &CVec| -> f64 { g.iter().zip(w.iter()).map(|(x, z)| x * z.norm_sqr()).sum() };
    if energy(&v) <= e {
        return v;
    }
    let mut ground = CVec::from_fn(g.len(), |i, _| if g[i] == 0.0 { v[i] } else { C64::new(0.0, 0.0) });
    let gn = ground.norm();
    if gn > 0.0 {
        ground.unscale_mut(gn);
    } else {
        ground[0] = C64::new(1.0, 0.0);
    }
    // Align phases so that the blend never cancels the ground component.
    let overlap = ground.dotc(&v);
    let v = if overlap.norm() > 0.0 { v * (overlap.conj() / overlap.norm()) } else { v };
    let blend = |s: f64| -> CVec { (&v * C64::new(1.0 - s, 0.0) + &ground * C64::new(s, 0.0)).normalize() };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BLEND_STEPS {
        let mid = 0.5 * (lo + hi);
        if energy(&blend(mid)) <= e {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    blend(hi)
}

/// Pure state with energy at most `E`; see [`sample_constrained_vector`].
pub fn sample_constrained_pure(g: &DiscreteOperator, e: f64, seed: u64) -> Result<DensityOperator> {
    if !(e > 0.0) {
        return invalid("energy budget must be positive");
    }
    DensityOperator::from_pure(&sample_constrained_vector(g.eigenvalues(), e, seed))
}

/// Ratios `‖A‖_E / √E` over a grid and the relative-bound pairs they imply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqrtGBoundEstimate {
    /// `(E, ‖A‖_E / √E)`.
    pub ratios: Vec<(f64, f64)>,
    /// Ratio at the largest `E`.
    pub extrapolated_bound: f64,
    /// `(a, b)` with `‖Aφ‖² ≤ a²‖φ‖² + b²‖√G φ‖²`.
    pub ab_pairs: Vec<(f64, f64)>,
}

/// `‖Aφ‖² ≤ ‖A‖²_E (‖φ‖² + ‖√G φ‖²/E)` for every `E`, so each grid point
/// yields the pair `(‖A‖_E, ‖A‖_E/√E)`.
pub fn sqrtg_bound_estimate(a: &CMat, g: &DiscreteOperator, e_grid: &[f64]) -> Result<SqrtGBoundEstimate> {
    if e_grid.is_empty() {
        return invalid("energy grid is empty");
    }
    if e_grid.iter().any(|&e| !(e > 0.0)) || e_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("energy grid must be positive and increasing");
    }
    let mut ratios = Vec::with_capacity(e_grid.len());
    let mut ab_pairs = Vec::with_capacity(e_grid.len());
    for &e in e_grid {
        let n = enorm(a, g, e)?.value;
        let ratio = n / e.sqrt();
        ratios.push((e, ratio));
        ab_pairs.push((n, ratio));
    }
    let extrapolated_bound = ratios.last().expect("nonempty").1;
    Ok(SqrtGBoundEstimate {
        ratios,
        extrapolated_bound,
        ab_pairs,
    })
}
