mod common;

use common::{c, random_matrix, rng};
use cspc::fourier::{
    extract_cycles, extract_cycles_counted, inverse_similarity_transform, similarity_transform, CycleSelection,
    OpCounter,
};
use cspc::matrix::{
    apply_cycle_mask, cycle_position, flip_matrix, fourier_matrix, frobenius_inner, full_cycle_matrix, place_cycle,
    ComplexMatrix,
};
use cspc::sparse::sparsify;
use proptest::prelude::*;
use rand::RngExt;

#[test]
fn fourier_matrix_is_unitary_and_squares_to_cj() {
    for n in 2..=64 {
        let w = fourier_matrix(n).unwrap();
        let id = w.matmul(&w.adjoint()).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(n)).unwrap() < 1e-12, "n={n}");
        let cj = full_cycle_matrix(n).unwrap().matmul(&flip_matrix(n).unwrap()).unwrap();
        assert!(w.matmul(&w).unwrap().max_abs_diff(&cj).unwrap() < 1e-12, "n={n}");
    }
}

#[test]
fn round_trip_across_sizes() {
    for n in (2..=64).chain([96, 100, 127, 128, 200, 255, 256, 300, 512]) {
        let a = random_matrix(n, n as u64);
        let b = similarity_transform(&a).unwrap();
        let back = inverse_similarity_transform(&b).unwrap();
        assert!(back.max_abs_diff(&a).unwrap() < 1e-10, "n={n}");
    }
}

#[test]
fn transform_agrees_with_explicit_product() {
    for n in [3, 8, 10, 17] {
        let a = random_matrix(n, 3);
        let w = fourier_matrix(n).unwrap();
        let explicit = w.matmul(&a).unwrap().matmul(&w.adjoint()).unwrap();
        let fast = similarity_transform(&a).unwrap();
        assert!(fast.max_abs_diff(&explicit).unwrap() < 1e-12);
    }
}

#[test]
fn pruned_counts_follow_the_op_formula() {
    let mut r = rng(4);
    for log in 3..=9u32 {
        let n = 1usize << log;
        let a = random_matrix(n, log as u64);
        for k in [1, 2, 4, 8].into_iter().filter(|&k| k <= n) {
            let mut picks: Vec<usize> = Vec::new();
            while picks.len() < k {
                let j = r.random_range(0..n);
                if !picks.contains(&j) {
                    picks.push(j);
                }
            }
            let sel = CycleSelection::new(n, picks).unwrap();
            let counter = OpCounter::new();
            extract_cycles_counted(&a, &sel, Some(&counter)).unwrap();
            let combines = counter.combines() as f64 / counter.vectors() as f64;
            let formula = (n - k) as f64 + n as f64 * (k as f64).log2();
            assert!(combines <= 2.0 * formula, "n={n} k={k}: {combines} > 2 * {formula}");
            // modulation adds one multiply per input
            assert_eq!(counter.modulations(), (n * n) as u64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(n in 1usize..60, seed in any::<u64>()) {
        let a = random_matrix(n, seed);
        let b = similarity_transform(&a).unwrap();
        prop_assert!((b.frobenius_norm() / a.frobenius_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_product_is_preserved_and_hermitian(n in 1usize..40, seed in any::<u64>()) {
        let a = random_matrix(n, seed);
        let b = random_matrix(n, seed.wrapping_add(1));
        let ab = frobenius_inner(&a, &b).unwrap();
        prop_assert!((ab - frobenius_inner(&b, &a).unwrap().conj()).norm() < 1e-10 * (1.0 + ab.norm()));
        let ta = similarity_transform(&a).unwrap();
        let tb = similarity_transform(&b).unwrap();
        let t = frobenius_inner(&ta, &tb).unwrap();
        prop_assert!((t - ab).norm() <= 1e-10 * a.frobenius_norm() * b.frobenius_norm());
    }

    #[test]
    fn cycles_partition_the_matrix(n in 1usize..40, seed in any::<u64>()) {
        let a = random_matrix(n, seed);
        let mut rebuilt = ComplexMatrix::zeros(n, n);
        let mut hits = vec![0u8; n * n];
        for k in 0..n {
            let cyc = apply_cycle_mask(&a, k).unwrap();
            place_cycle(&mut rebuilt, k, cyc.values()).unwrap();
            for t in 0..n {
                let (r, col) = cycle_position(n, k, t);
                hits[r * n + col] += 1;
            }
        }
        prop_assert_eq!(rebuilt, a);
        prop_assert!(hits.iter().all(|&h| h == 1));
    }

    #[test]
    fn pruned_extraction_matches_mask(log in 0u32..8, seed in any::<u64>(), frac in 0.0f64..1.0) {
        let n = 1usize << log;
        let a = random_matrix(n, seed);
        let mut r = rng(seed ^ 0x5eed);
        let count = ((n as f64 * frac) as usize).max(1);
        let mut picks: Vec<usize> = (0..count).map(|_| r.random_range(0..n)).collect();
        picks.sort_unstable();
        picks.dedup();
        let sel = CycleSelection::new(n, picks).unwrap();
        let got = extract_cycles(&a, &sel).unwrap().densify();
        let want = sparsify(&similarity_transform(&a).unwrap(), &sel).unwrap().densify();
        prop_assert!(got.max_abs_diff(&want).unwrap() < 1e-10);
    }
}

#[test]
fn zero_matrix_maps_to_zero() {
    let z = ComplexMatrix::zeros(6, 6);
    assert_eq!(similarity_transform(&z).unwrap().max_abs(), 0.0);
    let one = ComplexMatrix::from_fn(1, 1, |_, _| c(2.0, -1.0));
    assert_eq!(similarity_transform(&one).unwrap()[(0, 0)], c(2.0, -1.0));
}
