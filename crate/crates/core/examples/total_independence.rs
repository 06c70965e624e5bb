// Total independence for three and four variables.

use lancaster::hypothesis::HypothesisKind;
use lancaster::inference::{permutation_test_grams, GramSet, PermutationConfig, StatisticKind};
use lancaster::kernels::{gram, KernelSpec, VariableBlock};
use lancaster::sample::Sample;
use lancaster::{stats, synthetic};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = KernelSpec::gaussian_median();
    let null = synthetic::gen_null(200, 2, 3)?;
    let grams = GramSet::from_sample(&null, &kernel)?;
    let [k, l, m] = [&grams.grams()[0], &grams.grams()[1], &grams.grams()[2]];
    println!("total3 on independent data: {:.4e}", stats::total_indep3_v(k, l, m)?);

    // W = X + Y + Z makes four variables jointly dependent
    let a = synthetic::gen_dataset_a(200, 1, 3)?;
    let cols: Vec<Vec<f64>> = (0..3).map(|v| (0..a.n()).map(|i| a.blocks()[v].point(i)[0]).collect()).collect();
    let w: Vec<f64> = (0..a.n()).map(|i| cols[0][i] + cols[1][i] + cols[2][i]).collect();
    let four = Sample::new(vec![
        ("x".into(), VariableBlock::from_column(&cols[0])?),
        ("y".into(), VariableBlock::from_column(&cols[1])?),
        ("z".into(), VariableBlock::from_column(&cols[2])?),
        ("w".into(), VariableBlock::from_column(&w)?),
    ])?;
    let g4 = four.blocks().iter().map(|b| gram(&kernel, b)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<_> = g4.iter().collect();
    println!("totald, D = 4: {:.4e}", stats::total_indep_d_v(&refs)?);

    let set = GramSet::from_grams(g4)?;
    let result = permutation_test_grams(&set, HypothesisKind::TotalIndepD, StatisticKind::TotalD, &PermutationConfig::new(200, 0.05, 1))?;
    println!("p = {:.4}, reject = {}", result.p_value, result.reject);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
