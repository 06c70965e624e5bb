//! Brute-force reference computations.
//!
//! Nothing here shares code with the production statistics: sums are plain
//! nested loops, centering multiplies by an explicit `H`, and inner products
//! between embedded measures are evaluated by enumerating the atoms of both
//! measures. These are `O(n³)` to `O(n⁶)` and meant for small `n` only.

use crate::gram::RealMatrix;
use crate::stats::Measure;

pub fn naive_sum(a: &RealMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a.get(i, j);
        }
    }
    s
}

/// `I - (1/n)𝟙𝟙ᵀ`.
pub fn centering_matrix(n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / n as f64).expect("n ≥ 1")
}

/// `H·K·H` as two dense products.
pub fn explicit_center(k: &RealMatrix) -> RealMatrix {
    let h = centering_matrix(k.nrows());
    h.matmul(k).and_then(|hk| hk.matmul(&h)).expect("square input")
}

pub fn naive_hadamard_sum(mats: &[&RealMatrix]) -> f64 {
    let n = mats[0].nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += mats.iter().map(|m| m.get(i, j)).product::<f64>();
        }
    }
    s
}

/// Atoms `(x index, y index, z index)` and weights of an empirical measure.
fn atoms(measure: Measure, n: usize) -> Vec<([usize; 3], f64)> {
    let nf = n as f64;
    let mut out = Vec::new();
    match measure {
        Measure::Joint => (0..n).for_each(|a| out.push(([a, a, a], 1.0 / nf))),
        Measure::XyZ | Measure::XzY | Measure::YzX => {
            for a in 0..n {
                for b in 0..n {
                    let idx = match measure {
                        Measure::XyZ => [a, a, b],
                        Measure::XzY => [a, b, a],
                        _ => [b, a, a],
                    };
                    out.push((idx, 1.0 / (nf * nf)));
                }
            }
        }
        Measure::Product => {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        out.push(([a, b, c], 1.0 / (nf * nf * nf)));
                    }
                }
            }
        }
    }
    out
}

/// `⟨⟨ν, ν'⟩⟩` under `k ⊗ l ⊗ m` by summing the product kernel over every
/// pair of atoms of the two empirical measures.
pub fn nested_inner_product(k: &RealMatrix, l: &RealMatrix, m: &RealMatrix, a: Measure, b: Measure) -> f64 {
    let n = k.nrows();
    let (left, right) = (atoms(a, n), atoms(b, n));
    let mut s = 0.0;
    for (p, wp) in &left {
        for (q, wq) in &right {
            s += wp * wq * k.get(p[0], q[0]) * l.get(p[1], q[1]) * m.get(p[2], q[2]);
        }
    }
    s
}

/// `‖Σ cₐ νₐ‖²` from nested inner products.
pub fn nested_norm_sq(k: &RealMatrix, l: &RealMatrix, m: &RealMatrix, coefficients: [f64; 5]) -> f64 {
    let mut s = 0.0;
    for (i, a) in Measure::ALL.iter().enumerate() {
        for (j, b) in Measure::ALL.iter().enumerate() {
            if coefficients[i] != 0.0 && coefficients[j] != 0.0 {
                s += coefficients[i] * coefficients[j] * nested_inner_product(k, l, m, *a, *b);
            }
        }
    }
    s
}

/// The three terms of the D-variable total-independence statistic as literal
/// nested sums.
pub fn nested_total_indep_d(grams: &[&RealMatrix]) -> f64 {
    let n = grams[0].nrows();
    let nf = n as f64;
    let d = grams.len() as i32;
    let mut joint = 0.0;
    for a in 0..n {
        for b in 0..n {
            joint += grams.iter().map(|g| g.get(a, b)).product::<f64>();
        }
    }
    let mut cross = 0.0;
    for a in 0..n {
        let mut prod = 1.0;
        for g in grams {
            let mut row = 0.0;
            for b in 0..n {
                row += g.get(a, b);
            }
            prod *= row;
        }
        cross += prod;
    }
    let product: f64 = grams.iter().map(|g| naive_sum(g)).product();
    joint / (nf * nf) - 2.0 * cross / nf.powi(d + 1) + product / nf.powi(2 * d)
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
