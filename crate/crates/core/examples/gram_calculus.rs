// Centering and Hadamard sums on a small Gram matrix, checked against the
// explicit `H K H` product.

use lancaster::gram::{center, row_sums, sum_all, sum_hadamard2, trace, GramMatrix, RealMatrix};
use lancaster::oracle;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let k = GramMatrix::new(RealMatrix::from_rows(&[
        vec![1.0, 0.5, 0.2, 0.1],
        vec![0.5, 1.0, 0.4, 0.3],
        vec![0.2, 0.4, 1.0, 0.6],
        vec![0.1, 0.3, 0.6, 1.0],
    ])?)?;
    let l = GramMatrix::new(RealMatrix::from_fn(4, 4, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()))?)?;

    let kc = center(&k);
    let explicit = oracle::explicit_center(&k);
    let gap = kc.as_slice().iter().zip(explicit.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |center(K) - HKH| = {gap:.2e}");
    println!("row sums of centered K: {:?}", row_sums(&kc));

    // (K o HLH)++ = (K o L)++ - (2/n)(KL)++ + K++ L++ / n^2
    let n = 4.0;
    let lhs = sum_hadamard2(&k, &center(&l))?;
    let rhs = sum_hadamard2(&k, &l)? - 2.0 / n * sum_all(&k.matmul(&l)?) + sum_all(&k) * sum_all(&l) / (n * n);
    println!("(K o HLH)++ = {lhs:.12}, expansion = {rhs:.12}");
    println!("tr(HKH) = {:.12}, tr K - K++/n = {:.12}", trace(&kc), trace(&k) - sum_all(&k) / n);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
