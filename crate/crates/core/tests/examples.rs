macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            #![allow(dead_code)]
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(gram_calculus, "gram_calculus.rs", gram_calculus_runs);
example!(kernels_bandwidth, "kernels_bandwidth.rs", kernels_bandwidth_runs);
example!(lancaster_statistic, "lancaster_statistic.rs", lancaster_statistic_runs);
example!(total_independence, "total_independence.rs", total_independence_runs);
example!(permutation_test, "permutation_test.rs", permutation_test_runs);
example!(vstructure, "vstructure.rs", vstructure_runs);
example!(counterexample_population, "counterexample_population.rs", counterexample_population_runs);
example!(power_curve, "power_curve.rs", power_curve_runs);
example!(csv_roundtrip, "csv_roundtrip.rs", csv_roundtrip_runs);
example!(covariance_witness, "covariance_witness.rs", covariance_witness_runs);
