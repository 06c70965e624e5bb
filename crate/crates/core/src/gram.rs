//! Dense matrix primitives for V-statistics on Gram matrices.
//!
//! Everything here is `O(n²)`: centering subtracts row and column means instead
//! of multiplying by the centering matrix `H = I - (1/n)𝟙𝟙ᵀ`, and Hadamard
//! sums are single passes over the entries.
//!
//! Reductions use a fixed-shape tree: each run of [`BLOCK`] terms is summed in
//! four lanes, and the block partials are combined with Neumaier compensated
//! summation. The result depends only on the input, never on scheduling.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Relative asymmetry accepted (and symmetrized away) by [`GramMatrix::new`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Number of terms summed in plain lanes before compensation kicks in.
pub const BLOCK: usize = 256;

/// Neumaier compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[inline(always)]
fn block_sum<F: Fn(usize) -> f64>(start: usize, end: usize, f: &F) -> f64 {
    let mut lanes = [0.0f64; 4];
    let mut i = start;
    while i + 4 <= end {
        lanes[0] += f(i);
        lanes[1] += f(i + 1);
        lanes[2] += f(i + 2);
        lanes[3] += f(i + 3);
        i += 4;
    }
    let mut tail = 0.0;
    while i < end {
        tail += f(i);
        i += 1;
    }
    let mut acc = CompensatedSum::default();
    for v in lanes {
        acc.add(v);
    }
    acc.add(tail);
    acc.value()
}

/// Sums `f(0) + … + f(len - 1)` with the crate's deterministic reduction tree.
#[inline]
pub fn sum_by<F: Fn(usize) -> f64>(len: usize, f: F) -> f64 {
    if len <= BLOCK {
        return block_sum(0, len, &f);
    }
    let mut acc = CompensatedSum::default();
    let mut start = 0;
    while start < len {
        let end = (start + BLOCK).min(len);
        acc.add(block_sum(start, end, &f));
        start = end;
    }
    acc.value()
}

/// Dense real matrix, row-major, finite entries only.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape(format!("empty matrix {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::shape(format!("row {bad} has a different length")));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// `rows × cols` matrix filled with `value`.
    ///
    /// Panics on an empty shape or a non-finite value.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self::new(rows, cols, vec![value; rows * cols]).expect("filled: valid shape and value")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Entrywise product `self ∘ other`.
    pub fn hadamard(&self, other: &RealMatrix) -> Result<RealMatrix> {
        same_shape(self, other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Dense product `self · other`, `O(n³)`. Used by oracles, not by statistics.
    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Applies `perm` to rows and columns: `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<RealMatrix> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(Error::shape("permutation length must match a square matrix"));
        }
        let n = self.rows;
        let mut data = Vec::with_capacity(n * n);
        for &pi in perm {
            let row = self.row(pi);
            data.extend(perm.iter().map(|&pj| row[pj]));
        }
        Ok(Self { rows: n, cols: n, data })
    }

    /// Relative asymmetry `max|Aᵢⱼ - Aⱼᵢ| / max|A|` (zero for the zero matrix).
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

fn same_shape(a: &RealMatrix, b: &RealMatrix) -> Result<()> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::shape(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

/// `A₊₊`, the sum of all entries.
pub fn sum_all(a: &RealMatrix) -> f64 {
    sum_by(a.rows, |i| {
        let row = a.row(i);
        sum_by(row.len(), |j| row[j])
    })
}

/// `(Aᵢ₊)ᵢ`, the vector of row sums.
pub fn row_sums(a: &RealMatrix) -> Vec<f64> {
    (0..a.rows)
        .map(|i| {
            let row = a.row(i);
            sum_by(row.len(), |j| row[j])
        })
        .collect()
}

pub fn trace(a: &RealMatrix) -> f64 {
    let n = a.rows.min(a.cols);
    sum_by(n, |i| a.get(i, i))
}

/// `(A ∘ B)₊₊` in one pass.
pub fn sum_hadamard2(a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    same_shape(a, b)?;
    Ok(sum_by(a.rows, |i| {
        let (ra, rb) = (a.row(i), b.row(i));
        sum_by(ra.len(), |j| ra[j] * rb[j])
    }))
}

/// `(A ∘ B ∘ C)₊₊` in one pass.
pub fn sum_hadamard3(a: &RealMatrix, b: &RealMatrix, c: &RealMatrix) -> Result<f64> {
    same_shape(a, b)?;
    same_shape(a, c)?;
    Ok(sum_by(a.rows, |i| {
        let (ra, rb, rc) = (a.row(i), b.row(i), c.row(i));
        sum_by(ra.len(), |j| ra[j] * rb[j] * rc[j])
    }))
}

/// Symmetric `n × n` kernel matrix, possibly centered.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    matrix: RealMatrix,
    centered: bool,
}

impl GramMatrix {
    /// Wraps a square matrix, symmetrizing as `(A + Aᵀ)/2` when the relative
    /// asymmetry is at most [`SYMMETRY_TOLERANCE`] and rejecting it otherwise.
    pub fn new(matrix: RealMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape(format!(
                "Gram matrix must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let asymmetry = matrix.asymmetry();
        if asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let mut matrix = matrix;
        if asymmetry > 0.0 {
            let n = matrix.rows;
            for i in 0..n {
                for j in (i + 1)..n {
                    let avg = 0.5 * (matrix.data[i * n + j] + matrix.data[j * n + i]);
                    matrix.data[i * n + j] = avg;
                    matrix.data[j * n + i] = avg;
                }
            }
        }
        Ok(Self {
            matrix,
            centered: false,
        })
    }

    /// Caller guarantees exact symmetry.
    pub(crate) fn from_symmetric(matrix: RealMatrix, centered: bool) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix, centered }
    }

    pub fn n(&self) -> usize {
        self.matrix.rows
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    /// Same Gram matrix for the reordered sample `x[perm[0]], x[perm[1]], …`.
    pub fn permuted(&self, perm: &[usize]) -> Result<GramMatrix> {
        Ok(Self {
            matrix: self.matrix.permuted(perm)?,
            centered: self.centered,
        })
    }

    /// Entrywise product of two Gram matrices: the Gram matrix of the product kernel.
    pub fn hadamard(&self, other: &GramMatrix) -> Result<GramMatrix> {
        Ok(Self::from_symmetric(self.matrix.hadamard(&other.matrix)?, false))
    }
}

impl Deref for GramMatrix {
    type Target = RealMatrix;

    fn deref(&self) -> &RealMatrix {
        &self.matrix
    }
}

/// Row means `Kᵢ₊/n` and grand mean `K₊₊/n²`.
pub(crate) fn means(k: &RealMatrix) -> (Vec<f64>, f64) {
    let n = k.rows as f64;
    let sums = row_sums(k);
    let total = sum_by(sums.len(), |i| sums[i]);
    let row_means = sums.into_iter().map(|s| s / n).collect();
    (row_means, total / (n * n))
}

/// `HKH`, computed as `K - (1/n)(K₊ + K₊ᵀ) + (1/n²)K₊₊𝟙𝟙ᵀ` without forming `H`.
pub fn center(k: &GramMatrix) -> GramMatrix {
    let n = k.n();
    let (r, g) = means(k);
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = k.row(i);
        // (rᵢ + rⱼ) is commutative, so the result is exactly symmetric.
        data.extend(row.iter().zip(&r).map(|(kij, rj)| kij - (r[i] + rj) + g));
    }
    GramMatrix::from_symmetric(RealMatrix { rows: n, cols: n, data }, true)
}

/// Validates `k` as a Gram matrix and centers it.
pub fn center_matrix(k: &RealMatrix) -> Result<GramMatrix> {
    Ok(center(&GramMatrix::new(k.clone())?))
}
