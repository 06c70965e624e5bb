//! Power-curve harness: rejection rates of permutation tests over a grid of
//! dimensions, written as CSV rows (one per dimension and test).

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisKind;
use crate::inference::{
    factorization_test_grams, permutation_test_grams, FactorizationMethod, GramSet, PermutationConfig, StatisticKind,
};
use crate::kernels::KernelSpec;
use crate::rng::derive_seed;
use crate::sample::Sample;
use crate::synthetic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dataset {
    A,
    B,
    Counterexample,
    Null,
}

impl Dataset {
    pub fn name(self) -> &'static str {
        match self {
            Dataset::A => "a",
            Dataset::B => "b",
            Dataset::Counterexample => "counterexample",
            Dataset::Null => "null",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Dataset::A, Dataset::B, Dataset::Counterexample, Dataset::Null]
            .into_iter()
            .find(|d| d.name() == name)
    }

    /// Draws a sample; the counterexample is scalar and ignores `p`.
    pub fn generate(self, n: usize, p: usize, seed: u64) -> Result<Sample> {
        match self {
            Dataset::A => synthetic::gen_dataset_a(n, p, seed),
            Dataset::B => synthetic::gen_dataset_b(n, p, seed),
            Dataset::Counterexample => synthetic::gen_counterexample(n, seed),
            Dataset::Null => synthetic::gen_null(n, p, seed),
        }
    }

    /// Binary data makes the median distance zero about half the time, so
    /// the counterexample uses a unit bandwidth instead.
    pub fn default_kernel(self) -> KernelSpec {
        match self {
            Dataset::Counterexample => KernelSpec::gaussian_fixed(1.0).expect("positive bandwidth"),
            _ => KernelSpec::gaussian_median(),
        }
    }
}

/// Tests available to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BenchTest {
    /// Two-variable HSIC, `X ⫫ Y`.
    HsicXy,
    HsicXz,
    HsicYz,
    /// Two-variable HSIC of `(X,Y)` against `Z`.
    HsicXyZ,
    /// Lancaster statistic, `(X,Y) ⫫ Z` scheme.
    LancasterXyZ,
    /// Lancaster statistic, total-independence scheme.
    LancasterTotal,
    /// Total-independence statistic.
    Total3,
    /// Holm-corrected factorization test with the Lancaster statistic.
    FactorLancaster,
    /// Holm-corrected factorization test with two-variable HSIC.
    FactorPairwise,
}

impl BenchTest {
    pub const ALL: [BenchTest; 9] = [
        BenchTest::HsicXy,
        BenchTest::HsicXz,
        BenchTest::HsicYz,
        BenchTest::HsicXyZ,
        BenchTest::LancasterXyZ,
        BenchTest::LancasterTotal,
        BenchTest::Total3,
        BenchTest::FactorLancaster,
        BenchTest::FactorPairwise,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BenchTest::HsicXy => "hsic_xy",
            BenchTest::HsicXz => "hsic_xz",
            BenchTest::HsicYz => "hsic_yz",
            BenchTest::HsicXyZ => "hsic_xy_z",
            BenchTest::LancasterXyZ => "lancaster_xy_z",
            BenchTest::LancasterTotal => "lancaster_total",
            BenchTest::Total3 => "total3",
            BenchTest::FactorLancaster => "factor_lancaster",
            BenchTest::FactorPairwise => "factor_pairwise",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    /// Comma-separated test ids; `all` selects every test.
    pub fn parse_list(list: &str) -> Result<Vec<Self>> {
        if list.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        list.split(',')
            .map(|s| {
                Self::from_id(s.trim()).ok_or_else(|| {
                    let known: Vec<&str> = Self::ALL.iter().map(|t| t.id()).collect();
                    Error::invalid(format!("unknown test `{s}`; expected one of {}", known.join(", ")))
                })
            })
            .collect()
    }

    /// Runs the test on precomputed Grams; returns whether the null was rejected.
    pub fn rejects(self, grams: &GramSet, config: &PermutationConfig) -> Result<bool> {
        use HypothesisKind::*;
        let single = |h, s| permutation_test_grams(grams, h, s, config).map(|r| r.reject);
        match self {
            BenchTest::HsicXy => single(PairwiseIndepXy, StatisticKind::Hsic),
            BenchTest::HsicXz => single(PairwiseIndepXz, StatisticKind::Hsic),
            BenchTest::HsicYz => single(PairwiseIndepYz, StatisticKind::Hsic),
            BenchTest::HsicXyZ => single(JointPairIndepXyZ, StatisticKind::Hsic),
            BenchTest::LancasterXyZ => single(JointPairIndepXyZ, StatisticKind::Lancaster),
            BenchTest::LancasterTotal => single(TotalIndep3, StatisticKind::Lancaster),
            BenchTest::Total3 => single(TotalIndep3, StatisticKind::Total3),
            BenchTest::FactorLancaster => factorization_test_grams(grams, FactorizationMethod::Lancaster, config)
                .map(|r| r.factorization_rejected),
            BenchTest::FactorPairwise => factorization_test_grams(grams, FactorizationMethod::PairwiseTwoVariable, config)
                .map(|r| r.factorization_rejected),
        }
    }
}

/// A sweep over dimensions and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub dataset: Dataset,
    pub dims: Vec<usize>,
    pub n: usize,
    pub trials: usize,
    pub permutations: usize,
    pub alpha: f64,
    pub tests: Vec<BenchTest>,
    pub seed: u64,
    /// `None` uses [`Dataset::default_kernel`].
    pub kernel: Option<KernelSpec>,
    /// When off, `wall_time_seconds` is written as 0 and output is bit-stable.
    pub record_timing: bool,
}

impl BenchConfig {
    /// Desk-scale defaults: `n = 500`, 100 trials, 300 permutations, `α = 0.05`.
    pub fn new(dataset: Dataset, dims: Vec<usize>, tests: Vec<BenchTest>) -> Self {
        Self {
            dataset,
            dims,
            n: 500,
            trials: 100,
            permutations: 300,
            alpha: 0.05,
            tests,
            seed: 0,
            kernel: None,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::invalid("dimension grid must be non-empty and positive"));
        }
        if self.n == 0 || self.trials == 0 || self.permutations == 0 {
            return Err(Error::invalid("n, trials and permutations must be positive"));
        }
        if self.tests.is_empty() {
            return Err(Error::invalid("no tests selected"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    fn kernel(&self) -> KernelSpec {
        self.kernel.unwrap_or_else(|| self.dataset.default_kernel())
    }
}

/// Parses `LO:HI` or `LO:HI:STEP` (inclusive).
pub fn parse_dims(text: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad dimension `{s}` in `{text}`")))
    };
    let (lo, hi, step) = match parts.as_slice() {
        [single] => {
            let v = num(single)?;
            (v, v, 1)
        }
        [lo, hi] => (num(lo)?, num(hi)?, 1),
        [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
        _ => return Err(Error::invalid(format!("dimension grid `{text}` is not LO:HI[:STEP]"))),
    };
    if lo == 0 || hi < lo || step == 0 {
        return Err(Error::invalid(format!("empty dimension grid `{text}`")));
    }
    Ok((lo..=hi).step_by(step).collect())
}

/// Aggregated outcome of one (dimension, test) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub p: usize,
    pub test: String,
    pub n: usize,
    pub permutations: usize,
    pub trials: usize,
    pub rejections: usize,
    pub acceptance_rate: f64,
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    pub wall_time_seconds: f64,
}

/// Wilson score interval for `successes / trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lower = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

/// Seed of the sample drawn for `trial` at dimension `p`.
pub fn trial_sample_seed(master: u64, p: usize, trial: usize) -> u64 {
    derive_seed(master, &[p as u64, trial as u64])
}

/// Rejection flags `[trial][test]` at dimension `p`. Every test in a trial
/// sees the same sample, so columns can be compared pairwise.
pub fn run_trials(config: &BenchConfig, p: usize) -> Result<Vec<Vec<(bool, Duration)>>> {
    config.validate()?;
    let kernel = config.kernel();
    (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let sample = config.dataset.generate(config.n, p, trial_sample_seed(config.seed, p, trial))?;
            let grams = GramSet::from_sample(&sample, &kernel)?;
            config
                .tests
                .iter()
                .enumerate()
                .map(|(t, test)| {
                    let seed = derive_seed(config.seed, &[p as u64, trial as u64, t as u64 + 1]);
                    let cfg = PermutationConfig::new(config.permutations, config.alpha, seed);
                    let start = Instant::now();
                    let rejected = test.rejects(&grams, &cfg)?;
                    Ok((rejected, start.elapsed()))
                })
                .collect()
        })
        .collect()
}

pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.dims.len() * config.tests.len());
    for &p in &config.dims {
        let outcomes = run_trials(config, p)?;
        for (t, test) in config.tests.iter().enumerate() {
            let rejections = outcomes.iter().filter(|o| o[t].0).count();
            let accepted = config.trials - rejections;
            let (wilson_lower, wilson_upper) = wilson_interval(accepted, config.trials, 1.959_963_984_540_054);
            let wall_time_seconds = if config.record_timing {
                outcomes.iter().map(|o| o[t].1.as_secs_f64()).sum()
            } else {
                0.0
            };
            rows.push(BenchRow {
                dataset: config.dataset.name().to_string(),
                p,
                test: test.id().to_string(),
                n: config.n,
                permutations: config.permutations,
                trials: config.trials,
                rejections,
                acceptance_rate: accepted as f64 / config.trials as f64,
                wilson_lower,
                wilson_upper,
                wall_time_seconds,
            });
        }
    }
    Ok(rows)
}

pub fn write_rows_to(out: impl Write, rows: &[BenchRow]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_rows(path: impl AsRef<Path>, rows: &[BenchRow]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_rows_to(file, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_grammar() {
        assert_eq!(parse_dims("1:5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_dims("1:9:4").unwrap(), vec![1, 5, 9]);
        assert_eq!(parse_dims("3").unwrap(), vec![3]);
        assert!(parse_dims("5:1").is_err());
        assert!(parse_dims("0:3").is_err());
        assert!(parse_dims("1:3:0").is_err());
        assert!(parse_dims("a:b").is_err());
    }

    #[test]
    fn test_ids_round_trip() {
        for t in BenchTest::ALL {
            assert_eq!(BenchTest::from_id(t.id()), Some(t));
        }
        assert_eq!(BenchTest::parse_list("all").unwrap().len(), 9);
        assert_eq!(
            BenchTest::parse_list("hsic_xy, lancaster_xy_z").unwrap(),
            vec![BenchTest::HsicXy, BenchTest::LancasterXyZ]
        );
        assert!(BenchTest::parse_list("nope").is_err());
    }

    #[test]
    fn wilson_interval_properties() {
        let (lo, hi) = wilson_interval(95, 100, 1.96);
        assert!(lo < 0.95 && hi > 0.95);
        assert!(lo > 0.88 && hi < 0.98);
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(10, 10, 1.96);
        assert!(lo > 0.65);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut c = BenchConfig::new(Dataset::Null, vec![1], vec![BenchTest::HsicXy]);
        assert!(c.validate().is_ok());
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        c.alpha = 0.05;
        c.trials = 0;
        assert!(c.validate().is_err());
        c.trials = 1;
        c.tests.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn rows_follow_config_order_and_are_stable() {
        let mut c = BenchConfig::new(Dataset::Null, vec![1, 2], vec![BenchTest::HsicXy, BenchTest::Total3]);
        c.n = 30;
        c.trials = 4;
        c.permutations = 20;
        c.seed = 11;
        c.record_timing = false;
        let rows = run_bench(&c).unwrap();
        let keys: Vec<(usize, &str)> = rows.iter().map(|r| (r.p, r.test.as_str())).collect();
        assert_eq!(keys, [(1, "hsic_xy"), (1, "total3"), (2, "hsic_xy"), (2, "total3")]);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_rows_to(&mut a, &rows).unwrap();
        write_rows_to(&mut b, &run_bench(&c).unwrap()).unwrap();
        assert_eq!(a, b);
        for r in &rows {
            assert!(r.rejections <= r.trials);
            assert!((r.acceptance_rate - (1.0 - r.rejections as f64 / r.trials as f64)).abs() < 1e-15);
        }
    }
}
