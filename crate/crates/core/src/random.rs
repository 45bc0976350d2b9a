//! Seeded random instances: Hermitian matrices, unitaries, states, channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMat, CVec, C64};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed and a label.
pub fn derive_seed(base: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_normal(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Gaussian vector; normalize it for a Haar-random pure state.
pub fn gaussian_vector(rng: &mut impl Rng, d: usize) -> CVec {
    CVec::from_fn(d, |_, _| complex_normal(rng))
}

pub fn random_unit_vector(rng: &mut impl Rng, d: usize) -> CVec {
    gaussian_vector(rng, d).normalize()
}

/// GUE-like Hermitian matrix `(X + X*) / 2`.
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMat {
    let x = ginibre(rng, d, d);
    (&x + x.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMat {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
        for v in q.column_mut(k).iter_mut() {
            *v *= ph;
        }
    }
    q
}

/// Full-rank random density matrix `X X* / Tr(X X*)`.
pub fn random_density(rng: &mut impl Rng, d: usize) -> CMat {
    let x = ginibre(rng, d, d);
    let m = &x * x.adjoint();
    let tr = m.trace();
    m / tr
}
