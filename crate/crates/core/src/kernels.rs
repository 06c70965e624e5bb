//! Euclidean kernels, the median-distance bandwidth, and Gram construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{GramMatrix, RealMatrix};

/// One variable's observations: `n` rows of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableBlock {
    values: RealMatrix,
}

impl VariableBlock {
    pub fn new(values: RealMatrix) -> Self {
        Self { values }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::new(RealMatrix::from_rows(rows)?))
    }

    /// One-dimensional block.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Ok(Self::new(RealMatrix::new(values.len(), 1, values.to_vec())?))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn d(&self) -> usize {
        self.values.ncols()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &RealMatrix {
        &self.values
    }

    /// Rows reordered as `self[perm[0]], self[perm[1]], …`.
    pub fn select(&self, perm: &[usize]) -> Result<VariableBlock> {
        let d = self.d();
        let mut data = Vec::with_capacity(perm.len() * d);
        for &i in perm {
            if i >= self.n() {
                return Err(Error::invalid(format!("row index {i} out of range")));
            }
            data.extend_from_slice(self.point(i));
        }
        Ok(Self::new(RealMatrix::new(perm.len(), d, data)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    /// Median interpoint distance of the variable's own sample.
    MedianHeuristic,
    Fixed(f64),
}

/// Kernel family and bandwidth policy, applied per variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    /// `exp(-‖x - x'‖² / (2σ²))`.
    Gaussian(Bandwidth),
    /// `x · x'`.
    Linear,
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Gaussian(Bandwidth::MedianHeuristic)
    }
}

impl KernelSpec {
    pub fn gaussian_median() -> Self {
        KernelSpec::Gaussian(Bandwidth::MedianHeuristic)
    }

    pub fn gaussian_fixed(sigma: f64) -> Result<Self> {
        let spec = KernelSpec::Gaussian(Bandwidth::Fixed(sigma));
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Gaussian(Bandwidth::Fixed(s)) if !(s.is_finite() && *s > 0.0) => Err(
                Error::invalid(format!("Gaussian bandwidth must be positive and finite, got {s}")),
            ),
            _ => Ok(()),
        }
    }

    /// Bandwidth used for `x`; `None` for kernels without one.
    pub fn resolve_bandwidth(&self, x: &VariableBlock) -> Result<Option<f64>> {
        self.validate()?;
        match self {
            KernelSpec::Gaussian(Bandwidth::Fixed(s)) => Ok(Some(*s)),
            KernelSpec::Gaussian(Bandwidth::MedianHeuristic) => median_heuristic(x).map(Some),
            KernelSpec::Linear => Ok(None),
        }
    }

    /// Evaluates the kernel with an already resolved bandwidth.
    pub fn eval(&self, a: &[f64], b: &[f64], sigma: Option<f64>) -> f64 {
        match self {
            KernelSpec::Gaussian(_) => {
                let s = sigma.expect("Gaussian kernel needs a resolved bandwidth");
                (-squared_distance(a, b) / (2.0 * s * s)).exp()
            }
            KernelSpec::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Median of the `n(n-1)/2` pairwise Euclidean distances (lower median on
/// even counts).
pub fn median_heuristic(x: &VariableBlock) -> Result<f64> {
    let n = x.n();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let xi = x.point(i);
        for j in (i + 1)..n {
            dists.push(squared_distance(xi, x.point(j)).sqrt());
        }
    }
    let mid = (dists.len() - 1) / 2;
    let (_, median, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    if *median == 0.0 {
        return Err(Error::DegenerateSample);
    }
    Ok(*median)
}

/// Gram matrix of `x` under `spec`, with the bandwidth that was used.
pub fn gram_with_bandwidth(spec: &KernelSpec, x: &VariableBlock) -> Result<(GramMatrix, Option<f64>)> {
    let sigma = spec.resolve_bandwidth(x)?;
    let n = x.n();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let xi = x.point(i);
        for j in i..n {
            let v = if i == j && matches!(spec, KernelSpec::Gaussian(_)) {
                1.0
            } else {
                spec.eval(xi, x.point(j), sigma)
            };
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    let gram = GramMatrix::from_symmetric(RealMatrix::new(n, n, data)?, false);
    Ok((gram, sigma))
}

pub fn gram(spec: &KernelSpec, x: &VariableBlock) -> Result<GramMatrix> {
    gram_with_bandwidth(spec, x).map(|(g, _)| g)
}

/// `K + f𝟙ᵀ + 𝟙fᵀ`: induces the same semimetric as `K` but need not be
/// positive definite.
pub fn equivalent_shift(k: &GramMatrix, f: &[f64]) -> Result<RealMatrix> {
    let n = k.n();
    if f.len() != n {
        return Err(Error::shape(format!("shift has length {}, expected {n}", f.len())));
    }
    RealMatrix::from_fn(n, n, |i, j| k.get(i, j) + (f[i] + f[j]))
}
