#![allow(dead_code)]

use lancaster::kernels::{gram, KernelSpec, VariableBlock};
use lancaster::{rng, GramMatrix, RealMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn normal_block(n: usize, d: usize, seed: u64) -> VariableBlock {
    let mut r = rng::stream(seed, 77);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.sample(StandardNormal)).collect()).collect();
    VariableBlock::from_rows(&rows).unwrap()
}

/// Gaussian Gram (median bandwidth) of `n` random points in `d` dimensions.
pub fn random_gram(n: usize, seed: u64) -> GramMatrix {
    gram(&KernelSpec::gaussian_median(), &normal_block(n, 1 + (seed % 3) as usize, seed)).unwrap()
}

pub fn random_triple(n: usize, seed: u64) -> [GramMatrix; 3] {
    [random_gram(n, 3 * seed), random_gram(n, 3 * seed + 1), random_gram(n, 3 * seed + 2)]
}

pub fn random_matrix(n: usize, m: usize, seed: u64) -> RealMatrix {
    let mut r = rng::stream(seed, 78);
    RealMatrix::from_fn(n, m, |_, _| r.random_range(-1.0..1.0)).unwrap()
}

pub fn random_symmetric(n: usize, seed: u64) -> GramMatrix {
    let a = random_matrix(n, n, seed);
    GramMatrix::new(RealMatrix::from_fn(n, n, |i, j| a.get(i, j) + a.get(j, i)).unwrap()).unwrap()
}

pub fn max_abs_diff(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    lancaster::oracle::rel_diff(a, b, 1e-300)
}

/// Unit-bandwidth Gaussian Gram; works down to `n = 1`.
pub fn random_gram_fixed(n: usize, seed: u64) -> GramMatrix {
    gram(&KernelSpec::gaussian_fixed(1.0).unwrap(), &normal_block(n, 2, seed)).unwrap()
}
