mod common;

use common::*;
use lancaster::gram::{center, row_sums, sum_all, sum_hadamard2, sum_hadamard3, trace, GramMatrix, RealMatrix};
use lancaster::oracle;
use proptest::prelude::*;

#[test]
fn sum_all_matches_double_loop() {
    for seed in 0..20 {
        let a = random_matrix(6, 6, seed);
        assert!((sum_all(&a) - oracle::naive_sum(&a)).abs() <= 1e-12);
    }
    assert_eq!(sum_all(&RealMatrix::ones(2, 2)), 4.0);
    assert_eq!(sum_all(&RealMatrix::zeros(3, 3)), 0.0);
}

#[test]
fn row_sums_match_loop() {
    let a = random_matrix(5, 5, 3);
    for (i, s) in row_sums(&a).iter().enumerate() {
        let direct: f64 = (0..5).map(|j| a.get(i, j)).sum();
        assert!((s - direct).abs() <= 1e-12);
    }
    assert_eq!(row_sums(&RealMatrix::identity(3)), vec![1.0; 3]);
    assert_eq!(row_sums(&RealMatrix::ones(4, 4)), vec![4.0; 4]);
}

#[test]
fn centering_matches_explicit_product() {
    for seed in 0..20 {
        let k = random_symmetric(8, seed);
        let c = center(&k);
        assert!(max_abs_diff(&c, &oracle::explicit_center(&k)) <= 1e-10);
        assert!(max_abs_diff(&center(&c), &c) <= 1e-12);
    }
    let ones = GramMatrix::new(RealMatrix::ones(2, 2)).unwrap();
    assert_eq!(center(&ones).max_abs(), 0.0);
}

#[test]
fn hadamard_sums_match_oracles() {
    for seed in 0..20 {
        let (a, b, c) = (random_matrix(7, 7, seed), random_matrix(7, 7, seed + 100), random_matrix(7, 7, seed + 200));
        let tr = trace(&a.matmul(&b.transpose()).unwrap());
        assert!(rel(sum_hadamard2(&a, &b).unwrap(), tr) <= 1e-11);
        assert!(rel(sum_hadamard3(&a, &b, &c).unwrap(), oracle::naive_hadamard_sum(&[&a, &b, &c])) <= 1e-11);
        assert!(rel(sum_hadamard3(&a, &b, &RealMatrix::ones(7, 7)).unwrap(), sum_hadamard2(&a, &b).unwrap()) <= 1e-14);
        assert!(rel(sum_hadamard2(&RealMatrix::identity(7), &a).unwrap(), trace(&a)) <= 1e-14);
    }
    let one = |v: f64| RealMatrix::new(1, 1, vec![v]).unwrap();
    assert_eq!(sum_hadamard3(&one(2.0), &one(3.0), &one(-0.5)).unwrap(), -3.0);
}

#[test]
fn sums_stay_accurate_under_cancellation() {
    // row pattern 1e16, 1, -1e16, 1: a left-to-right sum drops every 1
    let n = 64;
    let a = RealMatrix::from_fn(n, n, |_, j| [1e16, 1.0, -1e16, 1.0][j % 4]).unwrap();
    assert_eq!(sum_all(&a), (n * n / 2) as f64);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centering_equivalence_on_arbitrary_symmetric(n in 1usize..12, seed in 0u64..1000) {
        let k = random_symmetric(n, seed);
        let c = center(&k);
        prop_assert!(max_abs_diff(&c, &oracle::explicit_center(&k)) <= 1e-10);
        prop_assert!(sum_all(&c).abs() <= 1e-12 * (n * n) as f64 * k.max_abs().max(1.0));
        prop_assert_eq!(c.asymmetry(), 0.0);
    }

    #[test]
    fn trace_of_centered_matrix(n in 1usize..12, seed in 0u64..1000) {
        let l = random_symmetric(n, seed);
        let lhs = trace(&center(&l));
        let rhs = trace(&l) - sum_all(&l) / n as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * l.max_abs().max(1.0) * n as f64);
    }
}
