// Permutation tests on Dataset A: X and Y are independent, but Z depends on
// the pair jointly.

use lancaster::hypothesis::HypothesisKind;
use lancaster::inference::{permutation_test, PermutationConfig, StatisticKind};
use lancaster::kernels::KernelSpec;
use lancaster::synthetic;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sample = synthetic::gen_dataset_a(300, 1, 5)?;
    let kernel = KernelSpec::gaussian_median();
    let config = PermutationConfig::new(200, 0.05, 5);
    let runs = [
        (HypothesisKind::PairwiseIndepXy, StatisticKind::Hsic),
        (HypothesisKind::PairwiseIndepXz, StatisticKind::Hsic),
        (HypothesisKind::JointPairIndepXyZ, StatisticKind::Hsic),
        (HypothesisKind::JointPairIndepXyZ, StatisticKind::Lancaster),
        (HypothesisKind::TotalIndep3, StatisticKind::Total3),
        (HypothesisKind::TotalIndep3, StatisticKind::Lancaster),
    ];
    for (h, stat) in runs {
        let r = permutation_test(&sample, h, &kernel, stat, &config)?;
        println!("{:<7} {:<10} stat={:.4e} p={:.4} reject={}", h.name(), stat.name(), r.statistic, r.p_value, r.reject);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
