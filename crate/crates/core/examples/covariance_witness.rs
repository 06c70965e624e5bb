// Centered three-way covariance of unit-norm RKHS functions never exceeds the
// square root of the Lancaster statistic.

use lancaster::inference::GramSet;
use lancaster::kernels::KernelSpec;
use lancaster::rng;
use lancaster::{stats, synthetic};
use rand::Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sample = synthetic::gen_dataset_a(120, 1, 8)?;
    let grams = GramSet::from_sample(&sample, &KernelSpec::gaussian_median())?;
    let [k, l, m] = [&grams.grams()[0], &grams.grams()[1], &grams.grams()[2]];
    let bound = stats::lancaster_v(k, l, m)?.sqrt();

    let mut r = rng::stream(8, 0);
    let mut best = 0.0f64;
    for _ in 0..50 {
        let mut coef = || (0..k.n()).map(|_| r.random_range(-1.0..1.0)).collect::<Vec<f64>>();
        let (a, b, c) = (coef(), coef(), coef());
        best = best.max(stats::three_way_cov_empirical(k, l, m, &a, &b, &c, true)?.abs());
    }
    println!("largest |cov| over 50 random witnesses: {best:.4e}");
    println!("sqrt(lancaster):                        {bound:.4e}");
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
