use ecdnorm::linalg::trace_norm;
use ecdnorm::random::{random_density, random_hermitian, rng};
use ecdnorm::semigroups::{
    conservativity_residual, exp_semigroup_at, gaussian_channel_at, gkls_generator, qubit_flip, random_gkls,
    taylor_polynomial, GaussianMethod, SemigroupSpec,
};
use ecdnorm::verify::fit_loglog_slope;
use ecdnorm::{CMat, Superoperator, C64};
use proptest::prelude::*;

const TIMES: [f64; 3] = [0.1, 0.3, 1.0];

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn specs(seed: u64, d: usize) -> Vec<SemigroupSpec> {
    let mut r = rng(seed);
    let a = random_hermitian(&mut r, d);
    let (v, k) = random_gkls(&mut r, d, 2, 1.0);
    vec![
        SemigroupSpec::unitary(a.clone()).unwrap(),
        SemigroupSpec::gaussian(a).unwrap(),
        SemigroupSpec::gkls(v, k).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn semigroup_laws_and_channel_flags(seed in any::<u64>(), d in 2usize..6) {
        for spec in specs(seed, d) {
            for &t in &TIMES {
                let ct = spec.channel_at(t).unwrap();
                let j = ct.choi();
                prop_assert!(ecdnorm::linalg::eigh(j).min() >= -1e-9);
                let tp = ecdnorm::linalg::partial_trace(j, d, d, ecdnorm::linalg::Subsystem::A).unwrap();
                prop_assert!(max_abs(&(tp - CMat::identity(d, d))) <= 1e-10);
                for &s in &TIMES {
                    let composed = ct.compose(&spec.channel_at(s).unwrap()).unwrap();
                    let direct = spec.channel_at(t + s).unwrap();
                    prop_assert!(max_abs(&(composed.action() - direct.action())) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn generators_annihilate_trace(seed in any::<u64>(), d in 2usize..6) {
        let rho = random_density(&mut rng(seed ^ 1), d);
        for spec in specs(seed, d) {
            let out = spec.generator().unwrap().apply(&rho).unwrap();
            prop_assert!(out.trace().norm() <= 1e-10);
        }
    }

    #[test]
    fn gaussian_damping_is_monotone(seed in any::<u64>(), d in 2usize..6) {
        let mut r = rng(seed);
        let spec = SemigroupSpec::gaussian(CMat::from_diagonal(&random_hermitian(&mut r, d).diagonal())).unwrap();
        let rho = random_density(&mut r, d);
        let mut prev: Option<CMat> = None;
        for t in [0.0, 0.05, 0.2, 0.5, 1.0, 3.0] {
            let out = spec.channel_at(t).unwrap().apply(&rho).unwrap();
            if let Some(p) = &prev {
                for j in 0..d {
                    for k in 0..d {
                        if j != k {
                            prop_assert!(out[(j, k)].norm() <= p[(j, k)].norm() + 1e-14);
                        }
                    }
                }
            }
            prev = Some(out);
        }
    }

    #[test]
    fn exponential_matches_channels(seed in any::<u64>(), d in 2usize..5, t in 0.01f64..2.0) {
        for spec in specs(seed, d) {
            let via_exp = exp_semigroup_at(&spec.generator().unwrap(), t).unwrap();
            prop_assert!(max_abs(&(via_exp.action() - spec.channel_at(t).unwrap().action())) <= 1e-9);
        }
    }
}

#[test]
fn finite_differences_are_first_order() {
    for spec in specs(3, 4) {
        let rho = random_density(&mut rng(4), 4);
        let s_rho = spec.generator().unwrap().apply(&rho).unwrap();
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let t = 1e-2 * 10f64.powf(-(i as f64) / 5.0);
                let diff = (spec.channel_at(t).unwrap().apply(&rho).unwrap() - &rho) / C64::new(t, 0.0) - &s_rho;
                (t, trace_norm(&diff).unwrap())
            })
            .collect();
        let slope = fit_loglog_slope(&pts).unwrap();
        assert!(slope >= 0.9, "slope {slope}");
    }
}

#[test]
fn unitary_examples() {
    let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]));
    let spec = SemigroupSpec::unitary(a.clone()).unwrap();
    assert_eq!(spec.channel_at(0.0).unwrap().action(), Superoperator::identity(2).action());
    let rho = random_density(&mut rng(9), 2);
    let out = spec.channel_at(std::f64::consts::PI).unwrap().apply(&rho).unwrap();
    assert!((out[(0, 1)] + rho[(0, 1)]).norm() < 1e-12);
    assert!((out[(0, 0)] - rho[(0, 0)]).norm() < 1e-12);
    let x = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let s = spec.generator().unwrap().apply(&x).unwrap();
    let commutator = (&a * &x - &x * &a) * C64::new(0.0, -1.0);
    assert!(max_abs(&(s - commutator)) < 1e-14);
    assert!(SemigroupSpec::unitary(ecdnorm::random::ginibre(&mut rng(1), 2, 2)).is_err());
}

#[test]
fn gaussian_examples() {
    let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]));
    let rho = CMat::from_element(2, 2, C64::new(0.5, 0.0));
    let out = gaussian_channel_at(&a, 2.0, GaussianMethod::ClosedForm).unwrap().apply(&rho).unwrap();
    assert!((out[(0, 1)].re - 0.5 * (-1.0f64).exp()).abs() < 1e-14);
    let quad = gaussian_channel_at(&a, 2.0, GaussianMethod::Quadrature(64)).unwrap().apply(&rho).unwrap();
    assert!(max_abs(&(quad - out)) < 1e-10);
    let h = random_hermitian(&mut rng(2), 5);
    let closed = gaussian_channel_at(&h, 0.7, GaussianMethod::ClosedForm).unwrap();
    let quad = gaussian_channel_at(&h, 0.7, GaussianMethod::Quadrature(64)).unwrap();
    assert!(max_abs(&(closed.action() - quad.action())) < 1e-10);
}

#[test]
fn gkls_examples() {
    let gamma = 0.4;
    let (v, k) = qubit_flip(gamma);
    assert!(conservativity_residual(&v, &k).unwrap() < 1e-15);
    let s = gkls_generator(&v, &k).unwrap();
    let x = CMat::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let rho = random_density(&mut rng(6), 2);
    let expected = (&x * &rho * &x - &rho) * C64::new(gamma, 0.0);
    assert!(max_abs(&(s.apply(&rho).unwrap() - expected)) < 1e-14);
    let bad = CMat::identity(2, 2);
    assert!(gkls_generator(&v, &bad).is_err());
    assert!(SemigroupSpec::gkls(v, bad).is_err());
}

#[test]
fn taylor_polynomials() {
    let (v, k) = random_gkls(&mut rng(8), 3, 2, 1.0);
    let s = gkls_generator(&v, &k).unwrap();
    assert!(max_abs(&(taylor_polynomial(&s, 0.5, 0).unwrap().action() - Superoperator::identity(3).action())) < 1e-15);
    let one = taylor_polynomial(&s, 0.5, 1).unwrap();
    let expected = Superoperator::identity(3).add(&s.scale(0.5)).unwrap();
    assert!(max_abs(&(one.action() - expected.action())) < 1e-14);
    let far = taylor_polynomial(&s, 0.5, 30).unwrap();
    assert!(max_abs(&(far.action() - exp_semigroup_at(&s, 0.5).unwrap().action())) < 1e-10);
}
