//! V-statistics on Gram matrices.
//!
//! Every statistic here is the squared RKHS norm of a signed measure built
//! from the empirical joint `P̂_XYZ` and products of its marginals, under the
//! product kernel `k ⊗ l ⊗ m`. The production paths are the centered forms,
//! `O(n²)` and allocation free. [`InnerProductTable3`] evaluates the fifteen
//! pairwise inner products separately so that any such norm can be
//! re-assembled term by term as a cross-check.

use crate::error::{Error, Result};
use crate::gram::{means, row_sums, sum_by, trace, GramMatrix, RealMatrix};
use crate::hypothesis::{HypothesisKind, Variable};

fn check_sizes(grams: &[&GramMatrix]) -> Result<usize> {
    let n = grams[0].n();
    if let Some(g) = grams.iter().find(|g| g.n() != n) {
        return Err(Error::shape(format!("Gram matrices of size {n} and {}", g.n())));
    }
    Ok(n)
}

/// Row and grand means to subtract; all zero when the matrix stays uncentered.
struct Offsets {
    rows: Vec<f64>,
    grand: f64,
}

impl Offsets {
    fn new(k: &RealMatrix, center: bool) -> Self {
        if center {
            let (rows, grand) = means(k);
            Self { rows, grand }
        } else {
            Self {
                rows: vec![0.0; k.nrows()],
                grand: 0.0,
            }
        }
    }
}

/// `(A ∘ B ∘ C)₊₊` where each factor is the matrix or its centered version,
/// per `pattern`. Entry arithmetic matches [`crate::gram::center`] exactly.
pub(crate) fn centered_triple_sum(k: &RealMatrix, l: &RealMatrix, m: &RealMatrix, pattern: [bool; 3]) -> f64 {
    let n = k.nrows();
    let (ok, ol, om) = (
        Offsets::new(k, pattern[0]),
        Offsets::new(l, pattern[1]),
        Offsets::new(m, pattern[2]),
    );
    sum_by(n, |i| {
        let (rk, rl, rm) = (k.row(i), l.row(i), m.row(i));
        let (ki, li, mi) = (ok.rows[i], ol.rows[i], om.rows[i]);
        sum_by(n, |j| {
            (rk[j] - (ki + ok.rows[j]) + ok.grand)
                * (rl[j] - (li + ol.rows[j]) + ol.grand)
                * (rm[j] - (mi + om.rows[j]) + om.grand)
        })
    })
}

/// `‖P̂_XY - P̂_X P̂_Y‖²`, i.e. `(1/n²)(K ∘ HLH)₊₊`.
pub fn hsic_v(k: &GramMatrix, l: &GramMatrix) -> Result<f64> {
    let n = check_sizes(&[k, l])?;
    let ol = Offsets::new(l, true);
    let s = sum_by(n, |i| {
        let (rk, rl) = (k.row(i), l.row(i));
        let li = ol.rows[i];
        sum_by(n, |j| rk[j] * (rl[j] - (li + ol.rows[j]) + ol.grand))
    });
    Ok(s / (n * n) as f64)
}

/// The five measures whose pairwise inner products span every three-variable statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// `P̂_XYZ`
    Joint,
    /// `P̂_XY P̂_Z`
    XyZ,
    /// `P̂_XZ P̂_Y`
    XzY,
    /// `P̂_YZ P̂_X`
    YzX,
    /// `P̂_X P̂_Y P̂_Z`
    Product,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Joint,
        Measure::XyZ,
        Measure::XzY,
        Measure::YzX,
        Measure::Product,
    ];
}

/// Estimates of `⟨⟨ν, ν'⟩⟩` under `k ⊗ l ⊗ m` for all pairs of [`Measure`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductTable3 {
    entries: [[f64; 5]; 5],
}

impl InnerProductTable3 {
    pub fn get(&self, a: Measure, b: Measure) -> f64 {
        self.entries[a as usize][b as usize]
    }

    /// `‖Σ cₐ νₐ‖²` for coefficients ordered as [`Measure::ALL`].
    pub fn norm_sq(&self, coefficients: [f64; 5]) -> f64 {
        let mut s = 0.0;
        for (a, ca) in coefficients.iter().enumerate() {
            for (b, cb) in coefficients.iter().enumerate() {
                s += ca * cb * self.entries[a][b];
            }
        }
        s
    }
}

/// Coefficients over [`Measure::ALL`] of the signed measure whose norm a
/// hypothesis' statistic estimates.
pub fn expansion_coefficients(h: HypothesisKind) -> Option<[f64; 5]> {
    use HypothesisKind::*;
    match h {
        Lancaster => Some([1.0, -1.0, -1.0, -1.0, 2.0]),
        IncompleteLancasterX => Some([1.0, -1.0, -1.0, 0.0, 1.0]),
        IncompleteLancasterY => Some([1.0, -1.0, 0.0, -1.0, 1.0]),
        IncompleteLancasterZ => Some([1.0, 0.0, -1.0, -1.0, 1.0]),
        JointPairIndepXyZ => Some([1.0, -1.0, 0.0, 0.0, 0.0]),
        JointPairIndepXzY => Some([1.0, 0.0, -1.0, 0.0, 0.0]),
        JointPairIndepYzX => Some([1.0, 0.0, 0.0, -1.0, 0.0]),
        TotalIndep3 => Some([1.0, 0.0, 0.0, 0.0, -1.0]),
        _ => None,
    }
}

fn weighted_sum(a: &RealMatrix, left: &[f64], right: &[f64]) -> f64 {
    sum_by(a.nrows(), |i| {
        let row = a.row(i);
        left[i] * sum_by(row.len(), |j| row[j] * right[j])
    })
}

fn hadamard_weighted(a: &RealMatrix, b: &RealMatrix, weights: &[f64]) -> f64 {
    sum_by(a.nrows(), |i| {
        let (ra, rb) = (a.row(i), b.row(i));
        sum_by(ra.len(), |j| ra[j] * rb[j] * weights[j])
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    sum_by(a.len(), |i| a[i] * b[i])
}

/// All fifteen inner products, `O(n²)` via row sums.
pub fn inner_products_3var(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix) -> Result<InnerProductTable3> {
    let n = check_sizes(&[k, l, m])? as f64;
    let (kr, lr, mr) = (row_sums(k), row_sums(l), row_sums(m));
    let ones = vec![1.0; kr.len()];
    let (kt, lt, mt) = (dot(&kr, &ones), dot(&lr, &ones), dot(&mr, &ones));
    let klm = centered_triple_sum(k, l, m, [false; 3]);
    let kl_had = hadamard_weighted(k, l, &ones);
    let km_had = hadamard_weighted(k, m, &ones);
    let lm_had = hadamard_weighted(l, m, &ones);
    let triple_rows = sum_by(kr.len(), |a| kr[a] * lr[a] * mr[a]);
    let (kl, km, lm) = (dot(&kr, &lr), dot(&kr, &mr), dot(&lr, &mr));

    use Measure::*;
    let mut t = InnerProductTable3 {
        entries: [[0.0; 5]; 5],
    };
    let mut set = |a: Measure, b: Measure, v: f64| {
        t.entries[a as usize][b as usize] = v;
        t.entries[b as usize][a as usize] = v;
    };
    let (n2, n3, n4, n5, n6) = (n * n, n.powi(3), n.powi(4), n.powi(5), n.powi(6));
    set(Joint, Joint, klm / n2);
    set(Joint, XyZ, hadamard_weighted(k, l, &mr) / n3);
    set(Joint, XzY, hadamard_weighted(k, m, &lr) / n3);
    set(Joint, YzX, hadamard_weighted(l, m, &kr) / n3);
    set(Joint, Product, triple_rows / n4);
    set(XyZ, XyZ, kl_had * mt / n4);
    set(XyZ, XzY, weighted_sum(k, &mr, &lr) / n4);
    set(XyZ, YzX, weighted_sum(l, &kr, &mr) / n4);
    set(XyZ, Product, kl * mt / n5);
    set(XzY, XzY, km_had * lt / n4);
    set(XzY, YzX, weighted_sum(m, &kr, &lr) / n4);
    set(XzY, Product, km * lt / n5);
    set(YzX, YzX, lm_had * kt / n4);
    set(YzX, Product, lm * kt / n5);
    set(Product, Product, kt * lt * mt / n6);
    Ok(t)
}

/// `‖Δ_L P̂‖² = (1/n²)(K̃ ∘ L̃ ∘ M̃)₊₊`.
pub fn lancaster_v(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix) -> Result<f64> {
    let n = check_sizes(&[k, l, m])?;
    Ok(centered_triple_sum(k, l, m, [true; 3]) / (n * n) as f64)
}

/// `‖Δ₍V₎P̂‖²`: centers the two matrices other than `uncentered`'s.
pub fn incomplete_lancaster_v(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix, uncentered: Variable) -> Result<f64> {
    let n = check_sizes(&[k, l, m])?;
    let mut pattern = [true; 3];
    pattern[uncentered.index()] = false;
    Ok(centered_triple_sum(k, l, m, pattern) / (n * n) as f64)
}

/// The centered V-statistic of a joint-pair, incomplete-Lancaster or
/// Lancaster hypothesis.
pub fn hypothesis_v(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix, h: HypothesisKind) -> Result<f64> {
    let pattern = h
        .centering_pattern()
        .ok_or_else(|| Error::invalid(format!("hypothesis `{h}` has no centered three-variable statistic")))?;
    let n = check_sizes(&[k, l, m])?;
    Ok(centered_triple_sum(k, l, m, pattern) / (n * n) as f64)
}

/// `‖P̂_XYZ - P̂_X P̂_Y P̂_Z‖²`.
pub fn total_indep3_v(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix) -> Result<f64> {
    let n = check_sizes(&[k, l, m])?;
    let nf = n as f64;
    let (kr, lr, mr) = (row_sums(k), row_sums(l), row_sums(m));
    let joint = centered_triple_sum(k, l, m, [false; 3]) / (nf * nf);
    let cross = sum_by(n, |a| (kr[a] / nf) * (lr[a] / nf) * (mr[a] / nf)) / nf;
    let total = |r: &[f64]| sum_by(n, |a| r[a]) / (nf * nf);
    let product = total(&kr) * total(&lr) * total(&mr);
    Ok(joint - 2.0 * cross + product)
}

/// `‖P̂_{X¹…X^D} - Πᵢ P̂_{Xⁱ}‖²` for `D ≥ 2` variables, `O(D·n²)`.
pub fn total_indep_d_v(grams: &[&GramMatrix]) -> Result<f64> {
    if grams.len() < 2 {
        return Err(Error::invalid(format!(
            "total independence needs at least 2 variables, got {}",
            grams.len()
        )));
    }
    let n = check_sizes(grams)?;
    let nf = n as f64;
    let joint = sum_by(n, |a| {
        sum_by(n, |b| grams.iter().map(|g| g.get(a, b)).product())
    }) / (nf * nf);
    let scaled_rows: Vec<Vec<f64>> = grams
        .iter()
        .map(|g| row_sums(g).into_iter().map(|s| s / nf).collect())
        .collect();
    let cross = sum_by(n, |a| scaled_rows.iter().map(|r| r[a]).product()) / nf;
    let product: f64 = scaled_rows.iter().map(|r| sum_by(n, |a| r[a]) / nf).product();
    Ok(joint - 2.0 * cross + product)
}

/// `tr(HKH) = Σᵢ (Kᵢᵢ - 2Kᵢ₊/n + K₊₊/n²)`, without forming `HKH`.
pub fn centered_trace(k: &GramMatrix) -> f64 {
    let (r, g) = means(k);
    sum_by(k.n(), |i| k.get(i, i) - (r[i] + r[i]) + g)
}

/// Leading bias of the Lancaster V-statistic under total independence,
/// `(1/n⁴) tr(K̃) tr(L̃) tr(M̃)`.
pub fn bias_estimate(k: &GramMatrix, l: &GramMatrix, m: &GramMatrix) -> Result<f64> {
    let n = check_sizes(&[k, l, m])? as f64;
    Ok(centered_trace(k) / n * (centered_trace(l) / n) * (centered_trace(m) / n) / n)
}

fn rkhs_norm_sq(k: &GramMatrix, a: &[f64]) -> Result<f64> {
    if a.len() != k.n() {
        return Err(Error::shape(format!(
            "coefficient vector of length {} for n = {}",
            a.len(),
            k.n()
        )));
    }
    let ka = mat_vec(k, a);
    let norm = dot(a, &ka);
    let scale = k.max_abs() * a.iter().map(|v| v.abs()).sum::<f64>().powi(2);
    if norm.is_nan() || norm <= f64::EPSILON * scale {
        return Err(Error::ZeroNorm);
    }
    Ok(norm)
}

fn mat_vec(k: &RealMatrix, a: &[f64]) -> Vec<f64> {
    (0..k.nrows())
        .map(|i| {
            let row = k.row(i);
            sum_by(row.len(), |j| row[j] * a[j])
        })
        .collect()
}

/// Rescales `a` so that `f = Σᵢ aᵢ k(·, xᵢ)` has unit RKHS norm.
pub fn unit_norm_coefficients(k: &GramMatrix, a: &[f64]) -> Result<Vec<f64>> {
    let norm = rkhs_norm_sq(k, a)?.sqrt();
    Ok(a.iter().map(|v| v / norm).collect())
}

/// Empirical centered three-way covariance `(1/n) Σᵢ f̃(xᵢ) g̃(yᵢ) h̃(zᵢ)` of
/// `f = Σ aⱼ k(·, xⱼ)`, `g = Σ bⱼ l(·, yⱼ)`, `h = Σ cⱼ m(·, zⱼ)`.
///
/// With `normalize`, the three functions are first scaled to unit RKHS norm.
#[allow(clippy::too_many_arguments)]
pub fn three_way_cov_empirical(
    k: &GramMatrix,
    l: &GramMatrix,
    m: &GramMatrix,
    a: &[f64],
    b: &[f64],
    c: &[f64],
    normalize: bool,
) -> Result<f64> {
    let n = check_sizes(&[k, l, m])?;
    let centered_values = |g: &GramMatrix, coef: &[f64]| -> Result<Vec<f64>> {
        let norm = rkhs_norm_sq(g, coef)?;
        let scale = if normalize { norm.sqrt() } else { 1.0 };
        let values = mat_vec(g, coef);
        let mean = sum_by(n, |i| values[i]) / n as f64;
        Ok(values.into_iter().map(|v| (v - mean) / scale).collect())
    };
    let (f, g, h) = (centered_values(k, a)?, centered_values(l, b)?, centered_values(m, c)?);
    Ok(sum_by(n, |i| f[i] * g[i] * h[i]) / n as f64)
}

/// Trace of `A` restricted to the centered subspace, via the materialized
/// `HAH`. Kept for cross-checks against [`centered_trace`].
pub fn centered_trace_materialized(k: &GramMatrix) -> f64 {
    trace(&crate::gram::center(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gram::RealMatrix;

    fn gram(n: usize, seed: u64) -> GramMatrix {
        let mut s = seed.wrapping_add(0x9e3779b97f4a7c15);
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts: Vec<f64> = (0..n).map(|_| next() * 3.0).collect();
        let m = RealMatrix::from_fn(n, n, |i, j| (-(pts[i] - pts[j]).powi(2) / 2.0).exp()).unwrap();
        GramMatrix::new(m).unwrap()
    }

    fn constant(n: usize, c: f64) -> GramMatrix {
        GramMatrix::new(RealMatrix::filled(n, n, c)).unwrap()
    }

    #[test]
    fn hsic_of_constant_is_zero() {
        let k = gram(7, 1);
        assert!(hsic_v(&k, &constant(7, 2.5)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn hsic_identity_pair() {
        let i = GramMatrix::new(RealMatrix::identity(2)).unwrap();
        assert!((hsic_v(&i, &i).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lancaster_degenerate_cases() {
        let (k, l) = (gram(6, 1), gram(6, 2));
        assert_eq!(lancaster_v(&k, &l, &constant(6, 1.0)).unwrap(), 0.0);
        let one = constant(1, 0.7);
        assert_eq!(lancaster_v(&one, &one, &one).unwrap(), 0.0);
    }

    #[test]
    fn incomplete_with_constant_centered_factor_vanishes() {
        let (l, m) = (gram(5, 3), gram(5, 4));
        let v = incomplete_lancaster_v(&constant(5, 1.0), &l, &m, Variable::Z).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn hypothesis_v_rejects_kinds_without_pattern() {
        let k = gram(4, 1);
        for h in [
            HypothesisKind::Factorization,
            HypothesisKind::TotalIndepD,
            HypothesisKind::TotalIndep3,
            HypothesisKind::PairwiseIndepXy,
        ] {
            assert!(hypothesis_v(&k, &k, &k, h).is_err());
        }
        let m = constant(4, 3.0);
        assert_eq!(hypothesis_v(&k, &gram(4, 2), &m, HypothesisKind::JointPairIndepXyZ).unwrap(), 0.0);
    }

    #[test]
    fn total_indep3_degenerate_cases() {
        let ones = constant(5, 1.0);
        assert_eq!(total_indep3_v(&ones, &ones, &ones).unwrap(), 0.0);
        let one = constant(1, 0.3);
        assert!(total_indep3_v(&one, &one, &one).unwrap().abs() < 1e-17);
    }

    #[test]
    fn total_indep_d_needs_two_variables() {
        let k = gram(3, 1);
        assert!(total_indep_d_v(&[&k]).is_err());
        assert!(total_indep_d_v(&[&k, &gram(4, 1)]).is_err());
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let (a, b) = (gram(3, 1), gram(4, 1));
        assert!(hsic_v(&a, &b).is_err());
        assert!(lancaster_v(&a, &a, &b).is_err());
        assert!(inner_products_3var(&a, &b, &a).is_err());
        assert!(bias_estimate(&a, &a, &b).is_err());
    }

    #[test]
    fn table_on_single_atom_and_ones() {
        let (k, l, m) = (constant(1, 2.0), constant(1, 3.0), constant(1, 0.5));
        let t = inner_products_3var(&k, &l, &m).unwrap();
        for a in Measure::ALL {
            for b in Measure::ALL {
                assert!((t.get(a, b) - 3.0).abs() < 1e-15);
            }
        }
        let ones = constant(6, 1.0);
        let t = inner_products_3var(&ones, &ones, &ones).unwrap();
        for a in Measure::ALL {
            for b in Measure::ALL {
                assert!((t.get(a, b) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bias_estimate_vanishes_for_constant_input() {
        let k = gram(6, 9);
        assert_eq!(bias_estimate(&k, &constant(6, 4.0), &k).unwrap(), 0.0);
    }

    #[test]
    fn centered_trace_matches_materialized() {
        let k = gram(11, 5);
        assert!((centered_trace(&k) - centered_trace_materialized(&k)).abs() < 1e-13);
    }

    #[test]
    fn covariance_of_constant_function_is_zero() {
        let n = 5;
        let k = GramMatrix::new(RealMatrix::identity(n)).unwrap();
        let (l, m) = (gram(n, 1), gram(n, 2));
        let ones = vec![1.0; n];
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 2.0).collect();
        let v = three_way_cov_empirical(&k, &l, &m, &ones, &b, &b, false).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn covariance_rejects_zero_norm() {
        let k = gram(4, 1);
        let zero = vec![0.0; 4];
        let one = vec![1.0; 4];
        assert!(matches!(
            three_way_cov_empirical(&k, &k, &k, &zero, &one, &one, true),
            Err(Error::ZeroNorm)
        ));
        assert!(matches!(unit_norm_coefficients(&k, &zero), Err(Error::ZeroNorm)));
    }

    #[test]
    fn covariance_is_odd_in_each_coefficient_vector() {
        let n = 6;
        let (k, l, m) = (gram(n, 1), gram(n, 2), gram(n, 3));
        let a: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let v = three_way_cov_empirical(&k, &l, &m, &a, &b, &b, true).unwrap();
        let w = three_way_cov_empirical(&k, &l, &m, &neg, &b, &b, true).unwrap();
        assert_eq!(v, -w);
    }
}
