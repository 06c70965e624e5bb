//! End-to-end self-check: matrix-algebra identities, brute-force agreement of
//! every statistic, and the exact discrete counterexample.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::gram::{center, row_sums, sum_all, sum_hadamard2, trace, GramMatrix, RealMatrix};
use crate::hypothesis::{HypothesisKind, Variable};
use crate::kernels::{equivalent_shift, gram as kernel_gram, KernelSpec, VariableBlock};
use crate::oracle::{self, rel_diff};
use crate::rng::stream;
use crate::stats::{self, expansion_coefficients, Measure};
use crate::synthetic::{counterexample_table, population_norm_discrete, DiscreteJoint, PopulationMeasure};

const IDENTITY_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-9;

/// Knobs for the self-check, including a negative control.
#[derive(Debug, Clone, Copy)]
pub struct SelfcheckOptions {
    /// Replace centering with a variant that drops the grand-mean term; the
    /// matrix-algebra checks must then fail.
    pub corrupt_centering: bool,
    pub seed: u64,
    /// Random instances per identity check.
    pub instances: usize,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            corrupt_centering: false,
            seed: 0,
            instances: 10,
        }
    }
}

impl SelfcheckOptions {
    fn center(&self, k: &GramMatrix) -> RealMatrix {
        if !self.corrupt_centering {
            return center(k).into_matrix();
        }
        let n = k.n() as f64;
        let r: Vec<f64> = row_sums(k).into_iter().map(|s| s / n).collect();
        RealMatrix::from_fn(k.n(), k.n(), |i, j| k.get(i, j) - (r[i] + r[j])).expect("finite")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst relative error (or absolute value, for checks against zero).
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelfcheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "[{status}] {:<40} worst {:.3e} (tol {:.0e})", c.name, c.worst, c.tolerance)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} passed, {failed} failed", self.checks.len(), self.checks.len() - failed)
    }
}

struct Runner {
    options: SelfcheckOptions,
    checks: Vec<CheckOutcome>,
}

impl Runner {
    fn symmetric(&self, n: usize, tag: u64) -> GramMatrix {
        let mut rng = stream(self.options.seed, tag);
        let a = RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).expect("finite");
        let s = RealMatrix::from_fn(n, n, |i, j| a.get(i, j) + a.get(j, i)).expect("finite");
        GramMatrix::new(s).expect("symmetric")
    }

    fn general(&self, n: usize, tag: u64) -> RealMatrix {
        let mut rng = stream(self.options.seed, tag);
        RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).expect("finite")
    }

    fn gaussian_gram(&self, n: usize, tag: u64) -> GramMatrix {
        let mut rng = stream(self.options.seed, tag);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let block = VariableBlock::from_rows(&pts).expect("finite");
        kernel_gram(&KernelSpec::gaussian_median(), &block).expect("non-degenerate")
    }

    /// Runs `f` over instances with sizes cycling through 2..=16; `f` returns
    /// a worst-case error for the instance.
    fn check(&mut self, name: &'static str, tolerance: f64, mut f: impl FnMut(&Runner, usize, u64) -> f64) {
        let mut worst = 0.0f64;
        for i in 0..self.options.instances {
            let n = 2 + (i * 3) % 15;
            let e = f(self, n, 1000 * i as u64 + name.len() as u64);
            worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
        }
        self.checks.push(CheckOutcome {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
        });
    }

    fn once(&mut self, name: &'static str, tolerance: f64, value: f64) {
        self.checks.push(CheckOutcome {
            name,
            passed: value <= tolerance,
            worst: value,
            tolerance,
        });
    }
}

fn max_entry_rel(a: &RealMatrix, b: &RealMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(1e-300);
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / scale))
}

fn ones_col(n: usize) -> RealMatrix {
    RealMatrix::ones(n, 1)
}

fn plus(k: &RealMatrix) -> RealMatrix {
    RealMatrix::ones(k.nrows(), k.nrows()).matmul(k).expect("square")
}

/// Runs every check and collects the outcomes.
pub fn run(options: SelfcheckOptions) -> SelfcheckReport {
    let mut r = Runner {
        options,
        checks: Vec::new(),
    };
    matrix_algebra(&mut r);
    centering(&mut r);
    statistics(&mut r);
    population(&mut r);
    SelfcheckReport { checks: r.checks }
}

fn matrix_algebra(r: &mut Runner) {
    r.check("identity: 1'1 = n", IDENTITY_TOL, |_, n, _| {
        let one = ones_col(n);
        rel_diff(one.transpose().matmul(&one).unwrap().get(0, 0), n as f64, 1.0)
    });
    r.check("identity: (11')++ = n^2", IDENTITY_TOL, |_, n, _| {
        rel_diff(sum_all(&RealMatrix::ones(n, n)), (n * n) as f64, 1.0)
    });
    r.check("identity: H^2 = H", IDENTITY_TOL, |_, n, _| {
        let h = oracle::centering_matrix(n);
        max_entry_rel(&h.matmul(&h).unwrap(), &h)
    });
    r.check("identity: A1 = row sums", IDENTITY_TOL, |run, n, t| {
        let a = run.general(n, t);
        let prod = a.matmul(&ones_col(n)).unwrap();
        row_sums(&a)
            .iter()
            .enumerate()
            .map(|(i, s)| rel_diff(*s, prod.get(i, 0), 1.0))
            .fold(0.0, f64::max)
    });
    r.check("identity: 1'A1 = A++", IDENTITY_TOL, |run, n, t| {
        let a = run.general(n, t);
        let one = ones_col(n);
        let q = one.transpose().matmul(&a).unwrap().matmul(&one).unwrap().get(0, 0);
        rel_diff(q, sum_all(&a), 1.0)
    });
    r.check("identity: (A11')++ = n A++", IDENTITY_TOL, |run, n, t| {
        let a = run.general(n, t);
        let lhs = sum_all(&a.matmul(&RealMatrix::ones(n, n)).unwrap());
        rel_diff(lhs, n as f64 * sum_all(&a), 1.0)
    });
    r.check("identity: linearity of ++", IDENTITY_TOL, |run, n, t| {
        let (a, b) = (run.general(n, t), run.general(n, t + 1));
        let combo = RealMatrix::from_fn(n, n, |i, j| 2.5 * a.get(i, j) - 0.75 * b.get(i, j)).unwrap();
        rel_diff(sum_all(&combo), 2.5 * sum_all(&a) - 0.75 * sum_all(&b), 1.0)
    });
    r.check("identity: (A11'B)++ = A++ B++", IDENTITY_TOL, |run, n, t| {
        let (a, b) = (run.general(n, t), run.general(n, t + 1));
        let lhs = sum_all(&a.matmul(&RealMatrix::ones(n, n)).unwrap().matmul(&b).unwrap());
        rel_diff(lhs, sum_all(&a) * sum_all(&b), 1.0)
    });
    r.check("identity: A o 11' = A", IDENTITY_TOL, |run, n, t| {
        let a = run.general(n, t);
        max_entry_rel(&a.hadamard(&RealMatrix::ones(n, n)).unwrap(), &a)
    });
    r.check("identity: (I o A)++ = tr A", IDENTITY_TOL, |run, n, t| {
        let a = run.general(n, t);
        rel_diff(sum_hadamard2(&RealMatrix::identity(n), &a).unwrap(), trace(&a), 1.0)
    });
    r.check("identity: (A o B)++ = tr(AB')", IDENTITY_TOL, |run, n, t| {
        let (a, b) = (run.general(n, t), run.general(n, t + 1));
        rel_diff(sum_hadamard2(&a, &b).unwrap(), trace(&a.matmul(&b.transpose()).unwrap()), 1.0)
    });
    r.check("identity: (A o K+)++ = (AK)++", IDENTITY_TOL, |run, n, t| {
        let (a, k) = (run.general(n, t), run.symmetric(n, t + 1));
        rel_diff(sum_hadamard2(&a, &plus(&k)).unwrap(), sum_all(&a.matmul(&k).unwrap()), 1.0)
    });
    r.check("identity: (K+ o L+)++ = n (KL)++", IDENTITY_TOL, |run, n, t| {
        let (k, l) = (run.symmetric(n, t), run.symmetric(n, t + 1));
        let lhs = sum_hadamard2(&plus(&k), &plus(&l)).unwrap();
        rel_diff(lhs, n as f64 * sum_all(&k.matmul(&l).unwrap()), 1.0)
    });
    r.check("identity: (K+ o L+')++ = K++ L++", IDENTITY_TOL, |run, n, t| {
        let (k, l) = (run.symmetric(n, t), run.symmetric(n, t + 1));
        let lhs = sum_hadamard2(&plus(&k), &plus(&l).transpose()).unwrap();
        rel_diff(lhs, sum_all(&k) * sum_all(&l), 1.0)
    });
}

fn centering(r: &mut Runner) {
    r.check("centering: HKH without forming H", IDENTITY_TOL, |run, n, t| {
        let k = run.symmetric(n, t);
        max_entry_rel(&run.options.center(&k), &oracle::explicit_center(&k))
    });
    r.check("centering: idempotent", IDENTITY_TOL, |run, n, t| {
        let k = run.symmetric(n, t);
        let once = run.options.center(&k);
        let twice = run.options.center(&GramMatrix::new(once.clone()).unwrap());
        max_entry_rel(&twice, &once)
    });
    r.check("centering: (HKH)++ = 0", IDENTITY_TOL, |run, n, t| {
        let k = run.symmetric(n, t);
        sum_all(&run.options.center(&k)).abs() / ((n * n) as f64 * k.max_abs())
    });
    r.check("identity: (K o HLH)++ expansion", IDENTITY_TOL, |run, n, t| {
        let (k, l) = (run.symmetric(n, t), run.symmetric(n, t + 1));
        let nf = n as f64;
        let lhs = sum_hadamard2(&k, &run.options.center(&l)).unwrap();
        let rhs = sum_hadamard2(&k, &l).unwrap() - 2.0 / nf * sum_all(&k.matmul(&l).unwrap())
            + sum_all(&k) * sum_all(&l) / (nf * nf);
        rel_diff(lhs, rhs, k.max_abs() * l.max_abs())
    });
    r.check("identity: tr(HLH) = tr L - L++/n", IDENTITY_TOL, |run, n, t| {
        let l = run.symmetric(n, t);
        rel_diff(trace(&run.options.center(&l)), trace(&l) - sum_all(&l) / n as f64, l.max_abs())
    });
    r.check("two-variable centering equivalence", IDENTITY_TOL, |run, n, t| {
        let (k, l) = (run.gaussian_gram(n.max(3), t), run.gaussian_gram(n.max(3), t + 1));
        let (kc, lc) = (run.options.center(&k), run.options.center(&l));
        let a = sum_hadamard2(&k, &lc).unwrap();
        let b = sum_hadamard2(&kc, &l).unwrap();
        let c = sum_hadamard2(&kc, &lc).unwrap();
        rel_diff(a, b, 1e-12).max(rel_diff(a, c, 1e-12))
    });
}

fn statistics(r: &mut Runner) {
    let small = |n: usize| 2 + n % 5;
    r.check("inner products vs nested sums", ORACLE_TOL, |run, n, t| {
        let n = small(n);
        let (k, l, m) = (run.gaussian_gram(n + 1, t), run.gaussian_gram(n + 1, t + 1), run.gaussian_gram(n + 1, t + 2));
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        let mut worst = 0.0f64;
        for a in Measure::ALL {
            for b in Measure::ALL {
                let brute = oracle::nested_inner_product(&k, &l, &m, a, b);
                worst = worst.max(rel_diff(table.get(a, b), brute, 1e-12));
            }
        }
        worst
    });
    r.check("lancaster vs signed-measure expansion", ORACLE_TOL, |run, n, t| {
        let (k, l, m) = (run.gaussian_gram(n + 2, t), run.gaussian_gram(n + 2, t + 1), run.gaussian_gram(n + 2, t + 2));
        let table = stats::inner_products_3var(&k, &l, &m).unwrap();
        let expansion = table.norm_sq(expansion_coefficients(HypothesisKind::Lancaster).unwrap());
        rel_diff(stats::lancaster_v(&k, &l, &m).unwrap(), expansion, 1e-12)
    });
    r.check("centered patterns vs nested expansion", ORACLE_TOL, |run, n, t| {
        let n = small(n) + 1;
        let (k, l, m) = (run.gaussian_gram(n, t), run.gaussian_gram(n, t + 1), run.gaussian_gram(n, t + 2));
        use HypothesisKind::*;
        [
            JointPairIndepXyZ,
            JointPairIndepXzY,
            JointPairIndepYzX,
            IncompleteLancasterX,
            IncompleteLancasterY,
            IncompleteLancasterZ,
            Lancaster,
        ]
        .into_iter()
        .map(|h| {
            let brute = oracle::nested_norm_sq(&k, &l, &m, expansion_coefficients(h).unwrap());
            rel_diff(stats::hypothesis_v(&k, &l, &m, h).unwrap(), brute, 1e-12)
        })
        .fold(0.0, f64::max)
    });
    r.check("total independence vs nested sums", ORACLE_TOL, |run, n, t| {
        let n = small(n) + 1;
        let grams: Vec<GramMatrix> = (0..4).map(|d| run.gaussian_gram(n, t + d)).collect();
        let refs: Vec<&GramMatrix> = grams.iter().collect();
        let mats: Vec<&RealMatrix> = grams.iter().map(|g| g.matrix()).collect();
        let three = rel_diff(
            stats::total_indep3_v(refs[0], refs[1], refs[2]).unwrap(),
            oracle::nested_total_indep_d(&mats[..3]),
            1e-12,
        );
        let four = rel_diff(stats::total_indep_d_v(&refs).unwrap(), oracle::nested_total_indep_d(&mats), 1e-12);
        three.max(four)
    });
    r.check("lancaster invariant to kernel equivalence", ORACLE_TOL, |run, n, t| {
        let n = n + 2;
        let (k, l, m) = (run.gaussian_gram(n, t), run.gaussian_gram(n, t + 1), run.gaussian_gram(n, t + 2));
        let mut rng = stream(run.options.seed, t + 3);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let shifted = GramMatrix::new(equivalent_shift(&k, &f).unwrap()).unwrap();
        rel_diff(
            stats::lancaster_v(&shifted, &l, &m).unwrap(),
            stats::lancaster_v(&k, &l, &m).unwrap(),
            1e-12,
        )
    });
}

fn population(r: &mut Runner) {
    let kernels = [KernelSpec::gaussian_fixed(1.0).expect("positive"); 3];
    let table = counterexample_table();
    let lancaster = population_norm_discrete(&table, &kernels, PopulationMeasure::Lancaster).unwrap_or(f64::INFINITY);
    r.once("counterexample: Lancaster norm vanishes", 1e-12, lancaster.abs());
    let smallest_split = Variable::ALL
        .into_iter()
        .map(|v| population_norm_discrete(&table, &kernels, PopulationMeasure::JointPair(v)).unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    // passes when every factorization defect exceeds 1e-3
    r.once("counterexample: no factorization holds", 0.0, (1e-3 - smallest_split).max(0.0));
    let atoms = || [vec![0.0, 1.0], vec![0.0, 1.0, 2.0], vec![-1.0, 1.0]];
    let product = DiscreteJoint::product(atoms(), &[0.3, 0.7], &[0.2, 0.5, 0.3], &[0.6, 0.4]).expect("valid");
    let worst = [PopulationMeasure::Lancaster, PopulationMeasure::TotalIndependence]
        .into_iter()
        .map(|m| population_norm_discrete(&product, &kernels, m).unwrap_or(f64::INFINITY).abs())
        .fold(0.0, f64::max);
    r.once("product distribution: norms vanish", 1e-12, worst);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes_with_enough_checks() {
        let report = run(SelfcheckOptions::default());
        assert!(report.passed(), "{report}");
        assert!(report.checks.len() >= 20);
    }

    #[test]
    fn corrupted_centering_is_caught() {
        let report = run(SelfcheckOptions {
            corrupt_centering: true,
            ..Default::default()
        });
        assert!(!report.passed());
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        assert!(failed.contains(&"centering: HKH without forming H"), "{failed:?}");
        assert!(failed.contains(&"identity: tr(HLH) = tr L - L++/n"), "{failed:?}");
    }
}
