mod common;

use common::*;
use lancaster::gram::{center, sum_all, sum_hadamard2, trace, GramMatrix, RealMatrix};
use lancaster::hypothesis::{HypothesisKind, Variable};
use lancaster::oracle;
use lancaster::stats::{self, expansion_coefficients, Measure};
use proptest::prelude::*;

const ATOMIC: [HypothesisKind; 6] = [
    HypothesisKind::JointPairIndepXyZ,
    HypothesisKind::JointPairIndepXzY,
    HypothesisKind::JointPairIndepYzX,
    HypothesisKind::IncompleteLancasterX,
    HypothesisKind::IncompleteLancasterY,
    HypothesisKind::IncompleteLancasterZ,
];

#[test]
fn hsic_matches_three_term_expansion() {
    for seed in 0..20 {
        let [k, l, _] = random_triple(10, seed);
        let n = 10.0;
        let expansion = sum_hadamard2(&k, &l).unwrap() / (n * n) + sum_all(&k) * sum_all(&l) / n.powi(4)
            - 2.0 * sum_all(&k.matmul(&l).unwrap()) / n.powi(3);
        assert!(rel(stats::hsic_v(&k, &l).unwrap(), expansion) <= 1e-10);
    }
    let i2 = GramMatrix::new(RealMatrix::identity(2)).unwrap();
    assert!((stats::hsic_v(&i2, &i2).unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn table_entries_match_nested_sums() {
    for seed in 0..10 {
        let [k, l, m] = random_triple(8, seed);
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        for a in Measure::ALL {
            for b in Measure::ALL {
                let brute = oracle::nested_inner_product(&k, &l, &m, a, b);
                assert!(rel(table.get(a, b), brute) <= 1e-9, "{a:?},{b:?}");
                assert_eq!(table.get(a, b), table.get(b, a));
            }
        }
    }
}

#[test]
fn lancaster_matches_five_term_expansion() {
    for seed in 0..20 {
        let [k, l, m] = random_triple(10, seed);
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        let coefficients = expansion_coefficients(HypothesisKind::Lancaster).unwrap();
        assert!(rel(stats::lancaster_v(&k, &l, &m).unwrap(), table.norm_sq(coefficients)) <= 1e-9);
    }
}

#[test]
fn atomic_patterns_match_expansions() {
    for seed in 0..20 {
        let [k, l, m] = random_triple(8, seed);
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        for h in ATOMIC {
            let v = stats::hypothesis_v(&k, &l, &m, h).unwrap();
            assert!(rel(v, table.norm_sq(expansion_coefficients(h).unwrap())) <= 1e-9, "{h}");
            if seed < 4 {
                assert!(rel(v, oracle::nested_norm_sq(&k, &l, &m, expansion_coefficients(h).unwrap())) <= 1e-9, "{h}");
            }
        }
        for v in Variable::ALL {
            let direct = stats::incomplete_lancaster_v(&k, &l, &m, v).unwrap();
            let h = [HypothesisKind::IncompleteLancasterX, HypothesisKind::IncompleteLancasterY, HypothesisKind::IncompleteLancasterZ][v.index()];
            assert_eq!(direct, stats::hypothesis_v(&k, &l, &m, h).unwrap());
        }
    }
}

#[test]
fn joint_pair_pattern_is_hsic_of_product_kernel() {
    for seed in 0..10 {
        let [k, l, m] = random_triple(12, seed);
        let kl = k.hadamard(&l).unwrap();
        let v = stats::hypothesis_v(&k, &l, &m, HypothesisKind::JointPairIndepXyZ).unwrap();
        assert!(rel(v, stats::hsic_v(&kl, &m).unwrap()) <= 1e-12);
    }
}

#[test]
fn constant_factors_vanish() {
    let [k, l, _] = random_triple(9, 4);
    let c = GramMatrix::new(RealMatrix::filled(9, 9, 0.7)).unwrap();
    assert!(stats::hypothesis_v(&k, &l, &c, HypothesisKind::JointPairIndepXyZ).unwrap().abs() < 1e-15);
    assert!(stats::lancaster_v(&k, &c, &l).unwrap().abs() < 1e-15);
    assert!(stats::incomplete_lancaster_v(&c, &k, &l, Variable::Z).unwrap().abs() < 1e-15);
    assert!(stats::bias_estimate(&k, &l, &c).unwrap().abs() < 1e-15);
}

#[test]
fn incomplete_z_need_not_vanish_when_z_separates() {
    // X, Y dependent; Z independent of both
    let x = normal_block(40, 1, 1);
    let noise = normal_block(40, 1, 2);
    let y = lancaster::VariableBlock::from_rows(&(0..40).map(|i| vec![x.point(i)[0] + 0.3 * noise.point(i)[0]]).collect::<Vec<_>>()).unwrap();
    let z = normal_block(40, 1, 3);
    let spec = lancaster::KernelSpec::gaussian_median();
    let g = |b| lancaster::kernels::gram(&spec, b).unwrap();
    let (k, l, m) = (g(&x), g(&y), g(&z));
    let dz = stats::incomplete_lancaster_v(&k, &l, &m, Variable::Z).unwrap();
    let table = stats::inner_products_3var(&k, &l, &m).unwrap();
    let expansion = table.norm_sq(expansion_coefficients(HypothesisKind::IncompleteLancasterZ).unwrap());
    assert!(rel(dz, expansion) <= 1e-9);
    assert!(dz > 10.0 * stats::lancaster_v(&k, &l, &m).unwrap());
}

#[test]
fn total_independence_matches_expansion_and_reductions() {
    for seed in 0..20 {
        let [k, l, m] = random_triple(10, seed);
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        let t3 = stats::total_indep3_v(&k, &l, &m).unwrap();
        assert!(rel(t3, table.norm_sq(expansion_coefficients(HypothesisKind::TotalIndep3).unwrap())) <= 1e-9);
        assert!(rel(stats::total_indep_d_v(&[&k, &l]).unwrap(), stats::hsic_v(&k, &l).unwrap()) <= 1e-10);
        assert!(rel(stats::total_indep_d_v(&[&k, &l, &m]).unwrap(), t3) <= 1e-10);
    }
    for seed in 0..10 {
        let grams: Vec<GramMatrix> = (0..4).map(|d| random_gram(6, 40 + 4 * seed + d)).collect();
        let refs: Vec<&GramMatrix> = grams.iter().collect();
        let mats: Vec<&RealMatrix> = grams.iter().map(|g| g.matrix()).collect();
        assert!(rel(stats::total_indep_d_v(&refs).unwrap(), oracle::nested_total_indep_d(&mats)) <= 1e-9);
    }
    let ones = GramMatrix::new(RealMatrix::ones(5, 5)).unwrap();
    assert!(stats::total_indep3_v(&ones, &ones, &ones).unwrap().abs() < 1e-15);
}

#[test]
fn statistics_are_symmetric_in_variable_roles() {
    for seed in 0..10 {
        let [k, l, m] = random_triple(11, seed);
        let base = stats::lancaster_v(&k, &l, &m).unwrap();
        let total = stats::total_indep3_v(&k, &l, &m).unwrap();
        for (a, b, c) in [(&k, &m, &l), (&l, &k, &m), (&l, &m, &k), (&m, &k, &l), (&m, &l, &k)] {
            assert!(rel(stats::lancaster_v(a, b, c).unwrap(), base) <= 1e-12);
            assert!(rel(stats::total_indep3_v(a, b, c).unwrap(), total) <= 1e-12);
        }
        // the (X,Y)|Z pattern under a role swap is the (X,Z)|Y pattern
        let xy_z = stats::hypothesis_v(&k, &m, &l, HypothesisKind::JointPairIndepXyZ).unwrap();
        assert!(rel(xy_z, stats::hypothesis_v(&k, &l, &m, HypothesisKind::JointPairIndepXzY).unwrap()) <= 1e-12);
    }
}

#[test]
fn centered_traces_and_bias() {
    for seed in 0..10 {
        let [k, l, m] = random_triple(15, seed);
        for g in [&k, &l, &m] {
            let t = stats::centered_trace(g);
            assert!(t >= -1e-12);
            assert!(rel(t, trace(g) - sum_all(g) / 15.0) <= 1e-10);
            assert!(rel(t, trace(&center(g))) <= 1e-10);
        }
        let expected = stats::centered_trace(&k) * stats::centered_trace(&l) * stats::centered_trace(&m) / 15f64.powi(4);
        assert!(rel(stats::bias_estimate(&k, &l, &m).unwrap(), expected) <= 1e-12);
    }
}

#[test]
fn covariance_witness_obeys_bound() {
    let mut violations = 0;
    for seed in 0..100 {
        let n = 6 + (seed as usize % 20);
        let [k, l, m] = random_triple(n, seed);
        let coef = |s: u64| random_matrix(1, n, s).into_vec();
        let (a, b, c) = (coef(1000 + seed), coef(2000 + seed), coef(3000 + seed));
        let cov = stats::three_way_cov_empirical(&k, &l, &m, &a, &b, &c, true).unwrap();
        if cov.abs() > stats::lancaster_v(&k, &l, &m).unwrap().sqrt() + 1e-9 {
            violations += 1;
        }
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(stats::three_way_cov_empirical(&k, &l, &m, &neg, &b, &c, true).unwrap(), -cov);
        let unit = stats::unit_norm_coefficients(&k, &a).unwrap();
        let norm: f64 = (0..n).map(|i| (0..n).map(|j| unit[i] * k.get(i, j) * unit[j]).sum::<f64>()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
    assert_eq!(violations, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn lancaster_is_nonnegative_and_matches_nested(n in 2usize..8, seed in 0u64..10_000) {
        let [k, l, m] = random_triple(n, seed);
        let v = stats::lancaster_v(&k, &l, &m).unwrap();
        let nested = oracle::nested_norm_sq(&k, &l, &m, expansion_coefficients(HypothesisKind::Lancaster).unwrap());
        prop_assert!(v >= -1e-15);
        // expansion terms are O(1), so cancellation error is absolute
        let scale = stats::inner_products_3var(&k, &l, &m).unwrap().get(Measure::Joint, Measure::Joint);
        prop_assert!((v - nested).abs() <= 1e-9 * v.abs().max(nested.abs()).max(1e-5 * scale));
    }

    #[test]
    fn permuting_all_variables_together_leaves_statistics_unchanged(n in 3usize..14, seed in 0u64..10_000, rot in 1usize..13) {
        let [k, l, m] = random_triple(n, seed);
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let p = |g: &GramMatrix| g.permuted(&perm).unwrap();
        let (kp, lp, mp) = (p(&k), p(&l), p(&m));
        prop_assert!(rel(stats::lancaster_v(&kp, &lp, &mp).unwrap(), stats::lancaster_v(&k, &l, &m).unwrap()) <= 1e-12);
        prop_assert!(rel(stats::total_indep3_v(&kp, &lp, &mp).unwrap(), stats::total_indep3_v(&k, &l, &m).unwrap()) <= 1e-12);
    }
}
