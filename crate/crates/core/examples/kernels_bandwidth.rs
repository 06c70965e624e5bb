// Gaussian and linear Gram matrices, and the median-distance bandwidth.

use lancaster::kernels::{gram_with_bandwidth, median_heuristic, KernelSpec, VariableBlock};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let x = VariableBlock::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 4.0]])?;
    println!("median pairwise distance: {:.4}", median_heuristic(&x)?);

    for spec in [KernelSpec::gaussian_median(), KernelSpec::gaussian_fixed(0.5)?, KernelSpec::Linear] {
        let (k, sigma) = gram_with_bandwidth(&spec, &x)?;
        println!("{spec:?} sigma={sigma:?}");
        for i in 0..k.n() {
            let row: Vec<String> = k.row(i).iter().map(|v| format!("{v:7.4}")).collect();
            println!("  [{}]", row.join(" "));
        }
    }

    // constant data has no usable median distance
    let flat = VariableBlock::from_column(&[1.0, 1.0, 1.0])?;
    println!("constant column: {}", median_heuristic(&flat).unwrap_err());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
