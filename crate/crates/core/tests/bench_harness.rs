use lancaster::bench::{run_bench, BenchConfig, BenchRow, BenchTest, Dataset};

fn config(dataset: Dataset, dims: Vec<usize>, tests: &str) -> BenchConfig {
    let mut c = BenchConfig::new(dataset, dims, BenchTest::parse_list(tests).unwrap());
    c.record_timing = false;
    c
}

fn rate(rows: &[BenchRow], p: usize, test: &str) -> f64 {
    rows.iter().find(|r| r.p == p && r.test == test).unwrap().acceptance_rate
}

#[test]
fn null_acceptance_is_near_one_minus_alpha() {
    let mut c = config(Dataset::Null, vec![2], "all");
    c.n = 100;
    c.trials = 100;
    c.permutations = 99;
    c.seed = 11;
    for row in run_bench(&c).unwrap() {
        assert!(row.acceptance_rate >= 0.88, "{row:?}");
        assert!(row.rejections <= row.trials);
        assert_eq!(row.acceptance_rate, 1.0 - row.rejections as f64 / row.trials as f64);
        assert!(row.wilson_lower <= row.acceptance_rate && row.acceptance_rate <= row.wilson_upper);
    }
}

#[test]
fn dataset_a_joint_test_rejects_at_p_one() {
    let mut c = config(Dataset::A, vec![1], "lancaster_xy_z");
    c.n = 500;
    c.trials = 30;
    c.permutations = 100;
    c.seed = 12;
    let rows = run_bench(&c).unwrap();
    assert!(rows[0].acceptance_rate <= 0.1, "{:?}", rows[0]);
}

#[test]
fn dataset_a_acceptance_rises_with_dimension() {
    let tests = "hsic_xy_z,lancaster_xy_z,lancaster_total,total3,factor_lancaster,factor_pairwise";
    let mut c = config(Dataset::A, vec![1, 5, 9], tests);
    c.n = 200;
    c.trials = 40;
    c.permutations = 100;
    c.seed = 1;
    let rows = run_bench(&c).unwrap();
    for t in tests.split(',') {
        let r: Vec<f64> = [1, 5, 9].iter().map(|p| rate(&rows, *p, t)).collect();
        // non-decreasing up to sampling noise of 40 trials, and clearly up overall
        assert!(r[1] >= r[0] - 0.1 && r[2] >= r[1] - 0.1, "{t}: {r:?}");
        assert!(r[2] > r[0] + 0.3, "{t}: {r:?}");
    }
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let mut c = config(Dataset::B, vec![1, 2], "hsic_xz,lancaster_xy_z");
    c.n = 60;
    c.trials = 6;
    c.permutations = 30;
    c.seed = 3;
    let a = run_bench(&c).unwrap();
    assert_eq!(a, run_bench(&c).unwrap());
    let order: Vec<(usize, &str)> = a.iter().map(|r| (r.p, r.test.as_str())).collect();
    assert_eq!(order, [(1, "hsic_xz"), (1, "lancaster_xy_z"), (2, "hsic_xz"), (2, "lancaster_xy_z")]);
    assert!(a.iter().all(|r| r.wall_time_seconds == 0.0 && r.n == 60 && r.permutations == 30));
}
