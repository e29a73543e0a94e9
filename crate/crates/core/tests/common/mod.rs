#![allow(dead_code)]

use cspc::matrix::ComplexMatrix;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_distr::StandardNormal;
use rand_pcg::Pcg32;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> Pcg32 {
    Pcg32::seed_from_u64(seed)
}

pub fn gauss(rng: &mut Pcg32) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed);
    ComplexMatrix::from_fn(n, n, |_, _| gauss(&mut r))
}

pub fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut r = rng(seed);
    (0..n).map(|_| gauss(&mut r)).collect()
}

/// Hermitian positive definite with eigenvalues in `[1, 1 + n]`.
pub fn random_hpd(n: usize, seed: u64) -> ComplexMatrix {
    let g = random_matrix(n, seed);
    let mut a = g.matmul(&g.adjoint()).expect("square");
    let s = 1.0 / n as f64;
    a = a.scale(c(s, 0.0));
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    a
}

pub fn random_index(rng: &mut Pcg32, n: usize) -> usize {
    rng.random_range(0..n)
}
