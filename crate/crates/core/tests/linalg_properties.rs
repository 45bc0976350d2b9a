use ecdnorm::linalg::{
    eigh, expm_action, hermitian_function, kron, partial_trace, sign_contraction, trace_norm, vectorize, unvectorize,
    Subsystem,
};
use ecdnorm::random::{ginibre, random_density, random_hermitian, random_unitary, rng};
use ecdnorm::semigroups::{gkls_generator, random_gkls};
use ecdnorm::{CMat, C64};
use proptest::prelude::*;

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_norm_triangle_and_unitary_invariance(seed in any::<u64>(), d in 2usize..7) {
        let mut r = rng(seed);
        let a = ginibre(&mut r, d, d);
        let b = ginibre(&mut r, d, d);
        let u = random_unitary(&mut r, d);
        let v = random_unitary(&mut r, d);
        let (na, nb) = (trace_norm(&a).unwrap(), trace_norm(&b).unwrap());
        prop_assert!(trace_norm(&(&a + &b)).unwrap() <= na + nb + 1e-10);
        prop_assert!((trace_norm(&(&u * &a * &v)).unwrap() - na).abs() <= 1e-10 * (1.0 + na));
    }

    #[test]
    fn hermitian_function_is_multiplicative(seed in any::<u64>(), d in 2usize..7) {
        let mut r = rng(seed);
        let m = random_hermitian(&mut r, d);
        let f = hermitian_function(&m, |x| x.sin()).unwrap().into_matrix();
        let g = hermitian_function(&m, |x| x * x + 1.0).unwrap().into_matrix();
        let fg = hermitian_function(&m, |x| x.sin() * (x * x + 1.0)).unwrap().into_matrix();
        prop_assert!(max_abs(&(f * g - fg)) <= 1e-10);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(seed in any::<u64>(), da in 1usize..5, dr in 1usize..5) {
        let mut r = rng(seed);
        let m = ginibre(&mut r, da * dr, da * dr);
        let t = m.trace();
        for s in [Subsystem::A, Subsystem::R] {
            prop_assert!((partial_trace(&m, da, dr, s).unwrap().trace() - t).norm() <= 1e-10 * (1.0 + t.norm()));
        }
        let rho = random_density(&mut r, da * dr);
        for s in [Subsystem::A, Subsystem::R] {
            prop_assert!(eigh(&partial_trace(&rho, da, dr, s).unwrap()).min() >= -1e-10);
        }
    }

    #[test]
    fn expm_of_gkls_generator_preserves_trace(seed in any::<u64>(), d in 2usize..5, t in 0.0f64..2.0) {
        let mut r = rng(seed);
        let (v, k) = random_gkls(&mut r, d, 2, 1.0);
        let s = gkls_generator(&v, &k).unwrap();
        let e = expm_action(s.action(), t).unwrap();
        let rho = random_density(&mut r, d);
        let out = unvectorize(&(e * vectorize(&rho)), d, d);
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn sign_contraction_attains_trace_norm(seed in any::<u64>(), d in 2usize..7) {
        let mut r = rng(seed);
        let x = random_hermitian(&mut r, d);
        let w = sign_contraction(&x).unwrap().into_matrix();
        prop_assert!(((&w * &x).trace().re - trace_norm(&x).unwrap()).abs() <= 1e-10);
        let ev = eigh(&w);
        prop_assert!(ev.min() >= -1.0 - 1e-10 && ev.max() <= 1.0 + 1e-10);
    }
}

#[test]
fn trace_norm_examples() {
    assert_eq!(trace_norm(&CMat::zeros(3, 3)).unwrap(), 0.0);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0)]));
    assert!((trace_norm(&d).unwrap() - 3.0).abs() < 1e-14);
    let mut nan = CMat::zeros(2, 2);
    nan[(0, 1)] = C64::new(f64::NAN, 0.0);
    assert!(trace_norm(&nan).is_err());
}

#[test]
fn partial_trace_of_product_and_bell_state() {
    let mut r = rng(1);
    let a = random_density(&mut r, 2);
    let b = random_density(&mut r, 3);
    let back = partial_trace(&kron(&a, &b), 2, 3, Subsystem::R).unwrap();
    assert!(max_abs(&(back - &a)) < 1e-14);
    let h = C64::new(0.5f64.sqrt(), 0.0);
    let psi = nalgebra::DVector::from_vec(vec![h, C64::new(0.0, 0.0), C64::new(0.0, 0.0), h]);
    let bell = &psi * psi.adjoint();
    let red = partial_trace(&bell, 2, 2, Subsystem::R).unwrap();
    assert!(max_abs(&(red - CMat::identity(2, 2) * C64::new(0.5, 0.0))) < 1e-14);
}

#[test]
fn expm_examples() {
    let l = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(-1.0, 0.0), C64::new(0.5, 2.0)]));
    assert_eq!(expm_action(&l, 0.0).unwrap(), CMat::identity(2, 2));
    let e = expm_action(&l, 0.7).unwrap();
    assert!((e[(0, 0)] - C64::new(-0.7f64, 0.0).exp()).norm() < 1e-13);
    assert!((e[(1, 1)] - (C64::new(0.5, 2.0) * 0.7).exp()).norm() < 1e-13);
    let mut r = rng(4);
    let m = ginibre(&mut r, 4, 4) * C64::new(0.3, 0.0);
    let lhs = expm_action(&m, 0.9).unwrap();
    let rhs = expm_action(&m, 0.4).unwrap() * expm_action(&m, 0.5).unwrap();
    assert!(max_abs(&(lhs - rhs)) < 1e-10);
}

#[test]
fn hermitian_function_examples() {
    let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(4.0, 0.0),
    ]));
    let s = hermitian_function(&m, f64::sqrt).unwrap().into_matrix();
    assert!((s[(2, 2)].re - 2.0).abs() < 1e-15 && s[(1, 1)].re == 1.0);
    let neg = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]));
    assert!(hermitian_function(&neg, f64::ln).is_err());
}
