use serde_json::json;

use super::{Axis, CheckBuilder, CheckResult, Dynamics, SweepPoint, SweepResult, Worst};
use crate::enorm::enorm;
use crate::error::{invalid, Result};
use crate::operators::{DiscreteOperator, Family};

/// Exponents within this distance of the threshold count as on it.
const THRESHOLD_EPS: f64 = 1e-12;

/// Ratios `‖G^β‖_E / √E` for number operators of each dimension, with
/// `β = α` for the unitary group and `β = 2α` for the Gaussian semigroup.
///
/// Below the threshold (`β < ½`) the ratios must settle in `d` (relative
/// change at most 1e-6 between the two largest dimensions), decrease in `E`
/// and match `E^{β−½}` at integer `E`. On it they equal 1. Above it they
/// grow with `d` by exactly `((d'−1)/(d−1))^{β−½}` for `E ≤ d − 1`.
pub fn check_threshold_sweep(
    dynamics: Dynamics,
    alphas: &[f64],
    d_list: &[usize],
    e_list: &[f64],
) -> Result<(Vec<CheckResult>, Vec<SweepResult>)> {
    if alphas.is_empty() || d_list.len() < 2 || e_list.is_empty() {
        return invalid("threshold sweep needs exponents, at least two dimensions and energies");
    }
    if d_list.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("dimensions must be increasing");
    }
    if e_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return invalid("energies must be positive");
    }
    let factor = match dynamics {
        Dynamics::Unitary => 1.0,
        Dynamics::Gaussian => 2.0,
    };
    let gs: Vec<DiscreteOperator> = d_list.iter().map(|&d| DiscreteOperator::number(d)).collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut sweeps = Vec::new();
    for &alpha in alphas {
        let beta = factor * alpha;
        // ratio[i][j]: dimension i, energy j
        let mut ratio = vec![vec![0.0; e_list.len()]; d_list.len()];
        for (i, g) in gs.iter().enumerate() {
            let a = g.family(Family::Power { alpha: beta })?.into_matrix();
            for (j, &e) in e_list.iter().enumerate() {
                ratio[i][j] = enorm(&a, g, e)?.value / e.sqrt();
            }
        }
        let id = format!("threshold/{}/alpha={alpha}", dynamics.name());
        for (j, &e) in e_list.iter().enumerate() {
            let points = d_list
                .iter()
                .enumerate()
                .map(|(i, &d)| SweepPoint { axis: d as f64, value: ratio[i][j], margin: None })
                .collect();
            sweeps.push(SweepResult::new(format!("{id}/E={e}"), Axis::Dimension, points, false));
        }
        let last = d_list.len() - 1;
        let points = e_list
            .iter()
            .enumerate()
            .map(|(j, &e)| SweepPoint { axis: e, value: ratio[last][j], margin: None })
            .collect();
        sweeps.push(SweepResult::new(format!("{id}/d={}", d_list[last]), Axis::Energy, points, false));

        let builder = |suffix: &str, claim: &str| {
            CheckBuilder::new(format!("{id}/{suffix}"), claim)
                .param("dynamics", dynamics.name())
                .param("alpha", alpha)
                .param("exponent", beta)
                .param("dims", json!(d_list))
                .param("energies", json!(e_list))
                .param("seed", 0)
        };
        let fits = |i: usize, e: f64| e <= d_list[i] as f64 - 1.0;

        if beta < 0.5 - THRESHOLD_EPS {
            let mut w = Worst::new();
            for j in 0..e_list.len() {
                let rel = (ratio[last][j] - ratio[last - 1][j]).abs() / ratio[last][j];
                w.push(rel, 1e-6, 0.0);
            }
            checks.push(w.finish(builder("d_stable", "‖G^β‖_E/√E settles as d grows (β below threshold)"), 0.0, false));

            let mut order: Vec<usize> = (0..e_list.len()).collect();
            order.sort_by(|&a, &b| e_list[a].total_cmp(&e_list[b]));
            let mut w = Worst::new();
            for p in order.windows(2) {
                w.push(ratio[last][p[1]], ratio[last][p[0]], 0.0);
            }
            checks.push(w.finish(builder("e_decreasing", "‖G^β‖_E/√E decreases in E (β below threshold)"), 0.0, false));

            let mut w = Worst::new();
            for (j, &e) in e_list.iter().enumerate() {
                if e.fract() == 0.0 && fits(last, e) {
                    w.push((ratio[last][j] - e.powf(beta - 0.5)).abs(), 0.0, 1e-9);
                }
            }
            checks.push(w.finish(builder("analytic", "‖G^β‖_E = E^β at eigenvalues E (β ≤ ½)"), 1e-9, false));
        } else if beta <= 0.5 + THRESHOLD_EPS {
            let mut w = Worst::new();
            for i in 0..d_list.len() {
                for (j, &e) in e_list.iter().enumerate() {
                    if fits(i, e) {
                        w.push((ratio[i][j] - 1.0).abs(), 0.0, 1e-9);
                    }
                }
            }
            checks.push(w.finish(builder("unit", "‖√G‖_E = √E"), 1e-9, false));
        } else {
            let mut grow = Worst::new();
            let mut factor_w = Worst::new();
            for i in 0..last {
                for (j, &e) in e_list.iter().enumerate() {
                    grow.push(ratio[i][j], ratio[i + 1][j], 0.0);
                    if fits(i, e) {
                        let measured = ratio[i + 1][j] / ratio[i][j];
                        let expected = ((d_list[i + 1] as f64 - 1.0) / (d_list[i] as f64 - 1.0)).powf(beta - 0.5);
                        factor_w.push((measured / expected - 1.0).abs(), 0.0, 1e-6);
                    }
                }
            }
            checks.push(grow.finish(builder("d_increasing", "‖G^β‖_E/√E increases with d (β above threshold)"), 0.0, false));
            checks.push(factor_w.finish(
                builder("growth_factor", "‖G^β‖_E/√E grows by (E_max'/E_max)^{β−½}"),
                1e-6,
                false,
            ));
        }
    }
    Ok((checks, sweeps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_signature() {
        let (checks, sweeps) =
            check_threshold_sweep(Dynamics::Unitary, &[0.25, 0.5, 0.75], &[16, 32, 64, 128], &[1.0, 4.0, 16.0])
                .unwrap();
        for c in &checks {
            assert!(c.passed, "{c:#?}");
        }
        assert_eq!(checks.len(), 3 + 1 + 2);
        let s = sweeps.iter().find(|s| s.sweep_id == "threshold/unitary/alpha=0.25/E=16").unwrap();
        assert!((s.points[3].value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn gaussian_uses_doubled_exponent() {
        let (checks, _) = check_threshold_sweep(Dynamics::Gaussian, &[0.125, 0.375], &[16, 32], &[1.0, 4.0]).unwrap();
        assert!(checks.iter().any(|c| c.check_id.ends_with("growth_factor")));
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(check_threshold_sweep(Dynamics::Unitary, &[0.5], &[32, 16], &[1.0]).is_err());
        assert!(check_threshold_sweep(Dynamics::Unitary, &[0.5], &[16, 32], &[]).is_err());
    }
}
