// Every three-variable statistic on one sample of Dataset A, plus the
// inner-product table the Lancaster statistic expands into.

use lancaster::hypothesis::HypothesisKind;
use lancaster::inference::GramSet;
use lancaster::kernels::KernelSpec;
use lancaster::stats::{self, expansion_coefficients, Measure};
use lancaster::synthetic;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sample = synthetic::gen_dataset_a(300, 1, 11)?;
    let grams = GramSet::from_sample(&sample, &KernelSpec::gaussian_median())?;
    let [k, l, m] = [&grams.grams()[0], &grams.grams()[1], &grams.grams()[2]];
    println!("bandwidths: {:?}", grams.bandwidths());

    use HypothesisKind::*;
    for h in [
        Lancaster,
        JointPairIndepXyZ,
        JointPairIndepXzY,
        JointPairIndepYzX,
        IncompleteLancasterX,
        IncompleteLancasterY,
        IncompleteLancasterZ,
    ] {
        println!("{:<10} {:.6e}", h.name(), stats::hypothesis_v(k, l, m, h)?);
    }
    println!("hsic(x,y)  {:.6e}", stats::hsic_v(k, l)?);
    println!("bias       {:.6e}", stats::bias_estimate(k, l, m)?);

    let table = stats::inner_products_3var(k, l, m)?;
    for a in Measure::ALL {
        let row: Vec<String> = Measure::ALL.iter().map(|b| format!("{:.5}", table.get(a, *b))).collect();
        println!("{a:?}: {}", row.join(" "));
    }
    let expansion = table.norm_sq(expansion_coefficients(Lancaster).ok_or("no expansion")?);
    println!("lancaster via table: {expansion:.6e}");
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
