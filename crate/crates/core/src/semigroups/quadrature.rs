//! Gauss–Hermite rules for `∫ e^{-u²} f(u) du`.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Nodes (ascending) and weights of the `n`-point rule.
///
/// Golub–Welsch eigenvalues seed a Newton iteration on the orthonormal
/// Hermite recurrence; weights are `1 / (n · p̃_{n−1}(x)²)`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return invalid("quadrature needs at least one node");
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (pn, pn1) = orthonormal_hermite(n, *x);
            let step = pn / ((2.0 * n as f64).sqrt() * pn1);
            *x -= step;
            if step.abs() <= 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
        let (_, pn1) = orthonormal_hermite(n, *x);
        weights.push(1.0 / (n as f64 * pn1 * pn1));
    }
    Ok((nodes, weights))
}

/// `(p̃_n(x), p̃_{n−1}(x))` for Hermite polynomials orthonormal under `e^{-x²}`.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for k in 0..n {
        let next = (2.0 / (k as f64 + 1.0)).sqrt() * x * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
