//! Permutation tests, Holm–Bonferroni correction, and the composite
//! factorization test used for V-structure detection.
//!
//! Gram matrices are computed once per sample. A permuted replicate never
//! re-evaluates a kernel: it reads the precomputed (and, where the statistic
//! calls for it, precentered) matrices through the permutation indices.
//! Centering commutes with a simultaneous row/column permutation, so this is
//! exactly the statistic of the permuted sample.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::{center, means, row_sums, sum_by, GramMatrix, RealMatrix};
use crate::hypothesis::{HypothesisKind, Variable};
use crate::kernels::{gram_with_bandwidth, KernelSpec};
use crate::rng::{derive_seed, stream};
use crate::sample::Sample;

pub const DEFAULT_PERMUTATIONS: usize = 500;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Which statistic a permutation test evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    /// `‖Δ_L P̂‖²`
    Lancaster,
    /// `‖Δ_tot P̂‖²` on three variables.
    Total3,
    /// `‖Δ_tot P̂‖²` on every variable of the sample.
    TotalD,
    /// Two-variable HSIC; a joint pair uses the product-kernel Gram `K ∘ L`.
    Hsic,
    /// The centered statistic tabulated for the hypothesis itself.
    #[serde(rename = "hyp")]
    Table4,
}

impl StatisticKind {
    pub fn name(self) -> &'static str {
        match self {
            StatisticKind::Lancaster => "lancaster",
            StatisticKind::Total3 => "total3",
            StatisticKind::TotalD => "totald",
            StatisticKind::Hsic => "hsic",
            StatisticKind::Table4 => "hyp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            StatisticKind::Lancaster,
            StatisticKind::Total3,
            StatisticKind::TotalD,
            StatisticKind::Hsic,
            StatisticKind::Table4,
        ]
        .into_iter()
        .find(|s| s.name() == name)
    }

    /// Hypothesis tested when none is named explicitly.
    pub fn default_hypothesis(self) -> HypothesisKind {
        match self {
            StatisticKind::Lancaster | StatisticKind::Total3 => HypothesisKind::TotalIndep3,
            StatisticKind::TotalD => HypothesisKind::TotalIndepD,
            StatisticKind::Hsic => HypothesisKind::PairwiseIndepXy,
            StatisticKind::Table4 => HypothesisKind::Lancaster,
        }
    }
}

/// Variables that are shuffled to simulate the null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PermutationScheme {
    PermuteOne(Variable),
    /// Two independent permutations `σ`, `τ`.
    PermuteTwo(Variable, Variable),
    /// Every variable but the first gets its own permutation (D-variable total independence).
    PermuteAllButFirst,
}

impl PermutationScheme {
    pub fn for_hypothesis(h: HypothesisKind) -> Result<Self> {
        use HypothesisKind::*;
        use PermutationScheme::*;
        Ok(match h {
            TotalIndep3 | Lancaster => PermuteTwo(Variable::Y, Variable::Z),
            TotalIndepD => PermuteAllButFirst,
            JointPairIndepYzX => PermuteOne(Variable::X),
            JointPairIndepXzY => PermuteOne(Variable::Y),
            JointPairIndepXyZ => PermuteOne(Variable::Z),
            // Δ₍V₎P vanishes when either centered variable splits off; shuffling
            // one of them produces such a split.
            IncompleteLancasterX => PermuteOne(Variable::Y),
            IncompleteLancasterY | IncompleteLancasterZ => PermuteOne(Variable::X),
            PairwiseIndepXy => PermuteOne(Variable::Y),
            PairwiseIndepXz | PairwiseIndepYz => PermuteOne(Variable::Z),
            Factorization => {
                return Err(Error::invalid(
                    "the factorization hypothesis is composite; use factorization_test",
                ))
            }
        })
    }
}

/// Permutation count, level, seed, and whether to keep the null replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationConfig {
    pub permutations: usize,
    pub alpha: f64,
    pub seed: u64,
    pub keep_null: bool,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        Self {
            permutations: DEFAULT_PERMUTATIONS,
            alpha: DEFAULT_ALPHA,
            seed: 0,
            keep_null: false,
        }
    }
}

impl PermutationConfig {
    pub fn new(permutations: usize, alpha: f64, seed: u64) -> Self {
        Self {
            permutations,
            alpha,
            seed,
            keep_null: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.permutations == 0 {
            return Err(Error::invalid("number of permutations must be at least 1"));
        }
        validate_alpha(self.alpha)
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Outcome of one permutation test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub hypothesis: HypothesisKind,
    pub statistic_kind: StatisticKind,
    pub statistic: f64,
    pub p_value: f64,
    pub permutations: usize,
    pub alpha: f64,
    pub reject: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_samples: Option<Vec<f64>>,
}

/// Gram matrices of a sample, one per variable, with the bandwidths used.
#[derive(Debug, Clone)]
pub struct GramSet {
    grams: Vec<GramMatrix>,
    bandwidths: Vec<Option<f64>>,
}

impl GramSet {
    /// Computes each variable's Gram matrix with its own resolved bandwidth.
    pub fn from_sample(sample: &Sample, kernel: &KernelSpec) -> Result<Self> {
        let (grams, bandwidths) = sample
            .blocks()
            .iter()
            .map(|b| gram_with_bandwidth(kernel, b))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(Self { grams, bandwidths })
    }

    pub fn from_grams(grams: Vec<GramMatrix>) -> Result<Self> {
        let Some(first) = grams.first() else {
            return Err(Error::invalid("no Gram matrices"));
        };
        let n = first.n();
        if grams.iter().any(|g| g.n() != n) {
            return Err(Error::shape("Gram matrices of different sizes"));
        }
        let bandwidths = vec![None; grams.len()];
        Ok(Self { grams, bandwidths })
    }

    pub fn n(&self) -> usize {
        self.grams[0].n()
    }

    pub fn grams(&self) -> &[GramMatrix] {
        &self.grams
    }

    pub fn bandwidths(&self) -> &[Option<f64>] {
        &self.bandwidths
    }

    fn get(&self, v: Variable) -> Result<&GramMatrix> {
        self.grams.get(v.index()).ok_or_else(|| {
            Error::invalid(format!(
                "three-variable statistic on {} variable(s)",
                self.grams.len()
            ))
        })
    }
}

fn incompatible(statistic: StatisticKind, h: HypothesisKind) -> Error {
    Error::Incompatible {
        statistic: statistic.name(),
        hypothesis: h.name(),
    }
}

fn check_compatible(statistic: StatisticKind, h: HypothesisKind) -> Result<()> {
    use HypothesisKind::*;
    let ok = match statistic {
        StatisticKind::Lancaster => matches!(
            h,
            TotalIndep3 | Lancaster | JointPairIndepXyZ | JointPairIndepXzY | JointPairIndepYzX
        ),
        StatisticKind::Total3 => h == TotalIndep3,
        StatisticKind::TotalD => h == TotalIndepD,
        StatisticKind::Hsic => matches!(
            h,
            PairwiseIndepXy
                | PairwiseIndepXz
                | PairwiseIndepYz
                | JointPairIndepXyZ
                | JointPairIndepXzY
                | JointPairIndepYzX
        ),
        StatisticKind::Table4 => h.centering_pattern().is_some(),
    };
    if ok {
        Ok(())
    } else {
        Err(incompatible(statistic, h))
    }
}

/// A statistic prepared for repeated evaluation under permutations.
enum Evaluator {
    /// `(1/n²) Σᵢⱼ Fᵢⱼ P_{σ(i)σ(j)}`
    One { fixed: RealMatrix, permuted: RealMatrix },
    /// `(1/n²) Σᵢⱼ Aᵢⱼ B_{σ(i)σ(j)} C_{τ(i)τ(j)}`
    Two {
        fixed: RealMatrix,
        first: RealMatrix,
        second: RealMatrix,
    },
    /// Total independence; the first matrix stays in place and every other
    /// one is permuted.
    Total {
        grams: Vec<RealMatrix>,
        scaled_rows: Vec<Vec<f64>>,
        product: f64,
    },
}

fn prepared(g: &GramMatrix, centered: bool) -> RealMatrix {
    if centered {
        center(g).into_matrix()
    } else {
        g.matrix().clone()
    }
}

impl Evaluator {
    fn build(grams: &GramSet, h: HypothesisKind, statistic: StatisticKind) -> Result<(Self, PermutationScheme)> {
        check_compatible(statistic, h)?;
        let scheme = PermutationScheme::for_hypothesis(h)?;
        if matches!(statistic, StatisticKind::Total3 | StatisticKind::TotalD) {
            let mats: Vec<&GramMatrix> = if statistic == StatisticKind::Total3 {
                Variable::ALL.iter().map(|v| grams.get(*v)).collect::<Result<_>>()?
            } else {
                if grams.grams.len() < 2 {
                    return Err(Error::invalid("total independence needs at least 2 variables"));
                }
                grams.grams.iter().collect()
            };
            return Ok((Self::total(&mats), scheme));
        }

        if let (StatisticKind::Hsic, Some(pair)) = (statistic, pairwise_variables(h)) {
            let (a, b) = (grams.get(pair.0)?, grams.get(pair.1)?);
            let evaluator = Evaluator::One {
                fixed: a.matrix().clone(),
                permuted: prepared(b, true),
            };
            return Ok((evaluator, scheme));
        }

        let pattern = match statistic {
            StatisticKind::Lancaster => [true; 3],
            _ => h.centering_pattern().ok_or_else(|| incompatible(statistic, h))?,
        };
        let mats: Vec<RealMatrix> = Variable::ALL
            .iter()
            .map(|v| Ok(prepared(grams.get(*v)?, pattern[v.index()])))
            .collect::<Result<_>>()?;
        let others = |skip: &[Variable]| -> Result<RealMatrix> {
            let rest: Vec<&RealMatrix> = Variable::ALL
                .iter()
                .filter(|v| !skip.contains(v))
                .map(|v| &mats[v.index()])
                .collect();
            rest[1..].iter().try_fold(rest[0].clone(), |acc, m| acc.hadamard(m))
        };
        let evaluator = match scheme {
            PermutationScheme::PermuteOne(v) => Evaluator::One {
                fixed: others(&[v])?,
                permuted: mats[v.index()].clone(),
            },
            PermutationScheme::PermuteTwo(a, b) => Evaluator::Two {
                fixed: others(&[a, b])?,
                first: mats[a.index()].clone(),
                second: mats[b.index()].clone(),
            },
            PermutationScheme::PermuteAllButFirst => return Err(incompatible(statistic, h)),
        };
        Ok((evaluator, scheme))
    }

    fn total(mats: &[&GramMatrix]) -> Self {
        let n = mats[0].n() as f64;
        let scaled_rows: Vec<Vec<f64>> = mats
            .iter()
            .map(|g| row_sums(g).into_iter().map(|s| s / n).collect())
            .collect();
        let product = mats
            .iter()
            .map(|g| {
                let (_, grand) = means(g);
                grand
            })
            .product();
        Evaluator::Total {
            grams: mats.iter().map(|g| g.matrix().clone()).collect(),
            scaled_rows,
            product,
        }
    }

    fn n(&self) -> usize {
        match self {
            Evaluator::One { fixed, .. } | Evaluator::Two { fixed, .. } => fixed.nrows(),
            Evaluator::Total { grams, .. } => grams[0].nrows(),
        }
    }

    /// Number of independent permutations one replicate draws.
    fn permutation_count(&self) -> usize {
        match self {
            Evaluator::One { .. } => 1,
            Evaluator::Two { .. } => 2,
            Evaluator::Total { grams, .. } => grams.len() - 1,
        }
    }

    fn evaluate(&self, perms: &[Vec<usize>]) -> f64 {
        let n = self.n();
        let nf = n as f64;
        match self {
            Evaluator::One { fixed, permuted } => {
                let s = &perms[0];
                sum_by(n, |i| {
                    let (f, p) = (fixed.row(i), permuted.row(s[i]));
                    sum_by(n, |j| f[j] * p[s[j]])
                }) / (nf * nf)
            }
            Evaluator::Two { fixed, first, second } => {
                let (s, t) = (&perms[0], &perms[1]);
                sum_by(n, |i| {
                    let (f, a, b) = (fixed.row(i), first.row(s[i]), second.row(t[i]));
                    sum_by(n, |j| f[j] * a[s[j]] * b[t[j]])
                }) / (nf * nf)
            }
            Evaluator::Total {
                grams,
                scaled_rows,
                product,
            } => {
                let index = |k: usize, i: usize| if k == 0 { i } else { perms[k - 1][i] };
                let joint = sum_by(n, |i| {
                    let rows: Vec<&[f64]> = grams.iter().enumerate().map(|(k, g)| g.row(index(k, i))).collect();
                    sum_by(n, |j| {
                        rows.iter().enumerate().map(|(k, r)| r[index(k, j)]).product()
                    })
                }) / (nf * nf);
                let cross = sum_by(n, |a| {
                    scaled_rows.iter().enumerate().map(|(k, r)| r[index(k, a)]).product()
                }) / nf;
                joint - 2.0 * cross + product
            }
        }
    }

    fn identity(&self) -> Vec<Vec<usize>> {
        vec![(0..self.n()).collect(); self.permutation_count()]
    }

    fn replicate(&self, seed: u64, index: usize) -> f64 {
        let mut rng = stream(seed, index as u64);
        let perms: Vec<Vec<usize>> = (0..self.permutation_count())
            .map(|_| {
                let mut p: Vec<usize> = (0..self.n()).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        self.evaluate(&perms)
    }
}

fn pairwise_variables(h: HypothesisKind) -> Option<(Variable, Variable)> {
    match h {
        HypothesisKind::PairwiseIndepXy => Some((Variable::X, Variable::Y)),
        HypothesisKind::PairwiseIndepXz => Some((Variable::X, Variable::Z)),
        HypothesisKind::PairwiseIndepYz => Some((Variable::Y, Variable::Z)),
        _ => None,
    }
}

/// `(1 + #{replicates ≥ observed}) / (B + 1)`.
pub fn add_one_p_value(observed: f64, null: &[f64]) -> f64 {
    let exceed = null.iter().filter(|v| **v >= observed).count();
    (1 + exceed) as f64 / (null.len() + 1) as f64
}

/// Clamps values in `[-1e-9·scale, 0)` to zero for display.
pub fn clamp_for_report(value: f64, scale: f64) -> f64 {
    if value < 0.0 && value >= -1e-9 * scale.max(f64::MIN_POSITIVE) {
        0.0
    } else {
        value
    }
}

/// Observed value of `statistic` for `h` on the unpermuted sample.
pub fn statistic_value(grams: &GramSet, h: HypothesisKind, statistic: StatisticKind) -> Result<f64> {
    let (evaluator, _) = Evaluator::build(grams, h, statistic)?;
    Ok(evaluator.evaluate(&evaluator.identity()))
}

/// Permutation test of `h` on precomputed Gram matrices.
pub fn permutation_test_grams(
    grams: &GramSet,
    h: HypothesisKind,
    statistic: StatisticKind,
    config: &PermutationConfig,
) -> Result<TestResult> {
    config.validate()?;
    let (evaluator, _) = Evaluator::build(grams, h, statistic)?;
    let observed = evaluator.evaluate(&evaluator.identity());
    let null: Vec<f64> = (0..config.permutations)
        .into_par_iter()
        .map(|b| evaluator.replicate(config.seed, b))
        .collect();
    let p_value = add_one_p_value(observed, &null);
    let scale: f64 = grams.grams.iter().map(|g| g.max_abs()).product();
    Ok(TestResult {
        hypothesis: h,
        statistic_kind: statistic,
        statistic: clamp_for_report(observed, scale),
        p_value,
        permutations: config.permutations,
        alpha: config.alpha,
        reject: p_value < config.alpha,
        seed: config.seed,
        null_samples: config.keep_null.then_some(null),
    })
}

/// Permutation test of `h` on a raw sample; bandwidths are resolved once on
/// the unpermuted data.
pub fn permutation_test(
    sample: &Sample,
    h: HypothesisKind,
    kernel: &KernelSpec,
    statistic: StatisticKind,
    config: &PermutationConfig,
) -> Result<TestResult> {
    config.validate()?;
    check_compatible(statistic, h)?;
    let grams = GramSet::from_sample(sample, kernel)?;
    permutation_test_grams(&grams, h, statistic, config)
}

/// Holm's step-down procedure: sorted p-values are rejected while
/// `p₍ₗ₎ < α/(m + 1 - l)`. Flags come back in input order.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if p_values.is_empty() {
        return Err(Error::invalid("Holm–Bonferroni needs at least one p-value"));
    }
    validate_alpha(alpha)?;
    if let Some(p) = p_values.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::invalid(format!("p-value {p} outside (0, 1]")));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]));
    let mut rejected = vec![false; m];
    for (l, &idx) in order.iter().enumerate() {
        if p_values[idx] < alpha / (m - l) as f64 {
            rejected[idx] = true;
        } else {
            break;
        }
    }
    Ok(rejected)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorizationMethod {
    /// Lancaster statistic under each single-variable permutation scheme.
    Lancaster,
    /// Two-variable HSIC of each variable against the other two.
    PairwiseTwoVariable,
}

/// The three sub-tests of the factorization hypothesis and their Holm-corrected verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeResult {
    pub method: FactorizationMethod,
    /// In the order `(Y,Z)⫫X`, `(X,Z)⫫Y`, `(X,Y)⫫Z`.
    pub results: Vec<TestResult>,
    pub sorted_p_values: Vec<f64>,
    /// Holm rejections, aligned with `results`.
    pub rejected: Vec<bool>,
    pub factorization_rejected: bool,
}

pub fn factorization_test_grams(
    grams: &GramSet,
    method: FactorizationMethod,
    config: &PermutationConfig,
) -> Result<CompositeResult> {
    config.validate()?;
    let statistic = match method {
        FactorizationMethod::Lancaster => StatisticKind::Lancaster,
        FactorizationMethod::PairwiseTwoVariable => StatisticKind::Hsic,
    };
    let results: Vec<TestResult> = HypothesisKind::factorization_parts()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let sub = PermutationConfig {
                seed: derive_seed(config.seed, &[i as u64]),
                ..*config
            };
            permutation_test_grams(grams, *h, statistic, &sub)
        })
        .collect::<Result<_>>()?;
    let p_values: Vec<f64> = results.iter().map(|r| r.p_value).collect();
    let rejected = holm_bonferroni(&p_values, config.alpha)?;
    let mut sorted_p_values = p_values;
    sorted_p_values.sort_by(f64::total_cmp);
    Ok(CompositeResult {
        method,
        results,
        sorted_p_values,
        factorization_rejected: rejected.iter().all(|r| *r),
        rejected,
    })
}

/// Tests whether any bivariate factorization of `(X, Y, Z)` holds.
pub fn factorization_test(
    sample: &Sample,
    method: FactorizationMethod,
    kernel: &KernelSpec,
    config: &PermutationConfig,
) -> Result<CompositeResult> {
    config.validate()?;
    let grams = GramSet::from_sample(sample, kernel)?;
    factorization_test_grams(&grams, method, config)
}

/// Flags a V-structure `X → Z ← Y`. Only meaningful when `X ⫫ Y` is known:
/// then no bivariate factorization holding is equivalent to the V-structure.
pub fn vstructure_detect(
    sample: &Sample,
    method: FactorizationMethod,
    kernel: &KernelSpec,
    config: &PermutationConfig,
) -> Result<(bool, CompositeResult)> {
    let composite = factorization_test(sample, method, kernel, config)?;
    Ok((composite.factorization_rejected, composite))
}
