use ecdnorm::operators::{sample_constrained_pure, sqrtg_bound_estimate};
use ecdnorm::random::{gaussian_vector, random_hermitian, rng};
use ecdnorm::{DiscreteOperator, Family};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ratios_decrease_and_pairs_are_feasible(seed in any::<u64>(), d in 2usize..10) {
        let g = DiscreteOperator::number(d).unwrap();
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, d);
        let grid = [0.1, 0.3, 0.7, 1.5, 3.0, 6.0];
        let est = sqrtg_bound_estimate(&a, &g, &grid).unwrap();
        for w in est.ratios.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-8);
        }
        for &(_, ratio) in &est.ratios {
            prop_assert!(est.extrapolated_bound <= ratio + 1e-8);
        }
        let ev = g.eigenvalues();
        for _ in 0..1000 {
            let phi = gaussian_vector(&mut r, d);
            let a_phi = (&a * &phi).norm_squared();
            let norm2 = phi.norm_squared();
            let g_phi: f64 = phi.iter().zip(ev).map(|(z, e)| e * z.norm_sqr()).sum();
            for &(aa, b) in &est.ab_pairs {
                prop_assert!(a_phi <= aa * aa * norm2 + b * b * g_phi + 1e-9 * (1.0 + a_phi));
            }
        }
    }

    #[test]
    fn power_family_is_exact(d in 2usize..40, alpha in 0.0f64..3.0) {
        let g = DiscreteOperator::number(d).unwrap();
        let m = g.family(Family::Power { alpha }).unwrap().into_matrix();
        for (k, e) in g.eigenvalues().iter().enumerate() {
            let expected = if alpha == 0.0 { 1.0 } else { e.powf(alpha) };
            prop_assert_eq!(m[(k, k)].re, expected);
        }
    }

    #[test]
    fn sampler_is_feasible_and_deterministic(seed in any::<u64>(), d in 2usize..20, e in 0.01f64..30.0) {
        let g = DiscreteOperator::number(d).unwrap();
        let a = sample_constrained_pure(&g, e, seed).unwrap();
        let b = sample_constrained_pure(&g, e, seed).unwrap();
        prop_assert_eq!(a.as_matrix(), b.as_matrix());
        prop_assert!(g.energy(a.as_matrix()).unwrap() <= e + 1e-10);
        prop_assert!((a.trace() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn family_examples() {
    let g = DiscreteOperator::custom(vec![0.0, 1.0, 4.0]).unwrap();
    let s = g.family(Family::Power { alpha: 0.5 }).unwrap().into_matrix();
    assert_eq!([s[(0, 0)].re, s[(1, 1)].re, s[(2, 2)].re], [0.0, 1.0, 2.0]);
    let g4 = DiscreteOperator::number(4).unwrap();
    let l = g4.family(Family::SqrtLog).unwrap().into_matrix();
    let expected = [0.0, 0.0, 2f64.ln().sqrt(), 3f64.ln().sqrt()];
    for (k, x) in expected.iter().enumerate() {
        assert_eq!(l[(k, k)].re, *x);
    }
    assert_eq!(g4.family(Family::Power { alpha: 1.0 }).unwrap(), g4.matrix());
    assert!(g4.family(Family::Power { alpha: -0.5 }).is_err());
}

#[test]
fn energies_of_simple_states() {
    let g = DiscreteOperator::custom(vec![0.0, 1.0, 2.0]).unwrap();
    let mut rho = ecdnorm::CMat::zeros(3, 3);
    rho[(0, 0)] = ecdnorm::C64::new(1.0, 0.0);
    assert_eq!(g.energy(&rho).unwrap(), 0.0);
    rho[(0, 0)] = ecdnorm::C64::new(0.5, 0.0);
    rho[(2, 2)] = ecdnorm::C64::new(0.5, 0.0);
    assert_eq!(g.energy(&rho).unwrap(), 1.0);
}

#[test]
fn sampler_limits() {
    let g = DiscreteOperator::number(6).unwrap();
    let loose = sample_constrained_pure(&g, 100.0, 3).unwrap();
    let raw = ecdnorm::operators::sample_constrained_vector(g.eigenvalues(), 1e9, 3);
    let raw = &raw * raw.adjoint();
    assert!((loose.as_matrix() - raw).iter().all(|z| z.norm() < 1e-15));
    let tight = sample_constrained_pure(&g, 1e-9, 3).unwrap();
    assert!(tight.as_matrix()[(0, 0)].re > 1.0 - 1e-8);
}

#[test]
fn bound_estimate_examples() {
    let g = DiscreteOperator::number(64).unwrap();
    let sqrt_g = g.family(Family::Power { alpha: 0.5 }).unwrap().into_matrix();
    for (_, ratio) in sqrtg_bound_estimate(&sqrt_g, &g, &[1.0, 4.0, 9.0]).unwrap().ratios {
        assert!((ratio - 1.0).abs() < 1e-9);
    }
    let quarter = g.family(Family::Power { alpha: 0.25 }).unwrap().into_matrix();
    let est = sqrtg_bound_estimate(&quarter, &g, &[16.0]).unwrap();
    assert!((est.ratios[0].1 - 0.5).abs() < 1e-9);
    let id = ecdnorm::CMat::identity(64, 64);
    let est = sqrtg_bound_estimate(&id, &g, &[1.0, 100.0, 10_000.0]).unwrap();
    assert!((est.extrapolated_bound - 0.01).abs() < 1e-9);
}
