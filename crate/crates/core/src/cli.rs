//! Command-line front end. The binary only forwards to [`main_with_args`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bench::{self, BenchConfig, BenchTest, Dataset};
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisKind;
use crate::inference::{self, FactorizationMethod, GramSet, PermutationConfig, StatisticKind};
use crate::io::{self, ColumnSpec};
use crate::kernels::{Bandwidth, KernelSpec};
use crate::selfcheck::{self, SelfcheckOptions};

#[derive(Debug, Parser)]
#[command(name = "lancaster", version, about = "Kernel tests for three-variable interaction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a synthetic sample and write it as CSV.
    Gen {
        #[arg(long, value_parser = ["a", "b", "counterexample", "null"])]
        dataset: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one permutation test and print a JSON result.
    Test {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vars: String,
        #[arg(long = "test", default_value = "lancaster", value_parser = ["lancaster", "total3", "totald", "hsic", "hyp"])]
        statistic: String,
        /// Defaults to the natural hypothesis of the statistic.
        #[arg(long)]
        hypothesis: Option<String>,
        #[arg(long, default_value = "gaussian", value_parser = ["gaussian", "linear"])]
        kernel: String,
        #[arg(long, default_value = "median")]
        bandwidth: String,
        #[arg(long, default_value_t = inference::DEFAULT_PERMUTATIONS)]
        permutations: usize,
        #[arg(long, default_value_t = inference::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Test whether any bivariate factorization of (X, Y, Z) holds.
    Factorize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        vars: String,
        #[arg(long, default_value = "lancaster", value_parser = ["lancaster", "pairwise"])]
        method: String,
        #[arg(long, default_value = "gaussian", value_parser = ["gaussian", "linear"])]
        kernel: String,
        #[arg(long, default_value = "median")]
        bandwidth: String,
        #[arg(long, default_value_t = inference::DEFAULT_PERMUTATIONS)]
        permutations: usize,
        #[arg(long, default_value_t = inference::DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Acceptance-rate sweep over dimensions, written as CSV.
    Bench {
        #[arg(long, value_parser = ["a", "b", "counterexample", "null"])]
        dataset: String,
        #[arg(long, default_value = "1:5")]
        dims: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 300)]
        permutations: usize,
        #[arg(long, default_value_t = inference::DEFAULT_ALPHA)]
        alpha: f64,
        /// Comma-separated test ids, or `all`.
        #[arg(long, default_value = "all")]
        tests: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write 0 for wall time so output is byte-stable.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity and oracle checks.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: sabotage centering so checks must fail.
        #[arg(long, hide = true)]
        corrupt_centering: bool,
    },
}

/// What a command printed and whether it succeeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub success: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, success: true }
    }
}

#[derive(Serialize)]
struct TestJson {
    test: &'static str,
    hypothesis: &'static str,
    statistic: f64,
    p_value: f64,
    permutations: usize,
    alpha: f64,
    reject: bool,
    seed: u64,
    bandwidths: Vec<Option<f64>>,
    n: usize,
    runtime_ms: f64,
}

#[derive(Serialize)]
struct SubTestJson {
    hypothesis: &'static str,
    statistic: f64,
    p_value: f64,
    reject_holm: bool,
}

#[derive(Serialize)]
struct FactorizeJson {
    method: &'static str,
    tests: Vec<SubTestJson>,
    sorted_p_values: Vec<f64>,
    factorization_rejected: bool,
    permutations: usize,
    alpha: f64,
    seed: u64,
    bandwidths: Vec<Option<f64>>,
    n: usize,
    runtime_ms: f64,
}

fn kernel_spec(kernel: &str, bandwidth: &str) -> Result<KernelSpec> {
    match kernel {
        "linear" => Ok(KernelSpec::Linear),
        _ if bandwidth == "median" => Ok(KernelSpec::Gaussian(Bandwidth::MedianHeuristic)),
        _ => {
            let sigma: f64 = bandwidth
                .parse()
                .map_err(|_| Error::invalid(format!("bandwidth must be `median` or a number, got `{bandwidth}`")))?;
            KernelSpec::gaussian_fixed(sigma)
        }
    }
}

fn dataset(name: &str) -> Result<Dataset> {
    Dataset::from_name(name).ok_or_else(|| Error::invalid(format!("unknown dataset `{name}`")))
}

fn hypothesis(statistic: StatisticKind, name: Option<&str>) -> Result<HypothesisKind> {
    match name {
        None => Ok(statistic.default_hypothesis()),
        Some("total") => Ok(HypothesisKind::TotalIndep3),
        Some(name) => HypothesisKind::from_name(name).ok_or_else(|| Error::invalid(format!("unknown hypothesis `{name}`"))),
    }
}

fn to_json(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Runs a parsed command.
pub fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Gen {
            dataset: name,
            n,
            p,
            seed,
            out,
        } => {
            if n == 0 || p == 0 {
                return Err(Error::invalid("n and p must be positive"));
            }
            let sample = dataset(&name)?.generate(n, p, seed)?;
            match out {
                Some(path) => {
                    io::write_sample(&path, &sample)?;
                    Ok(Outcome::ok(String::new()))
                }
                None => {
                    let mut buf = Vec::new();
                    io::write_sample_to(&mut buf, &sample).expect("in-memory write");
                    Ok(Outcome::ok(String::from_utf8(buf).expect("ascii")))
                }
            }
        }
        Command::Test {
            input,
            vars,
            statistic,
            hypothesis: h,
            kernel,
            bandwidth,
            permutations,
            alpha,
            seed,
        } => {
            let start = Instant::now();
            let statistic = StatisticKind::from_name(&statistic)
                .ok_or_else(|| Error::invalid(format!("unknown test `{statistic}`")))?;
            let h = hypothesis(statistic, h.as_deref())?;
            let config = PermutationConfig::new(permutations, alpha, seed);
            config.validate()?;
            let kernel = kernel_spec(&kernel, &bandwidth)?;
            let sample = io::read_sample(&input, &ColumnSpec::parse(&vars)?)?;
            let grams = GramSet::from_sample(&sample, &kernel)?;
            let result = inference::permutation_test_grams(&grams, h, statistic, &config)?;
            to_json(&TestJson {
                test: statistic.name(),
                hypothesis: h.name(),
                statistic: result.statistic,
                p_value: result.p_value,
                permutations,
                alpha,
                reject: result.reject,
                seed,
                bandwidths: grams.bandwidths().to_vec(),
                n: sample.n(),
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
            .map(Outcome::ok)
        }
        Command::Factorize {
            input,
            vars,
            method,
            kernel,
            bandwidth,
            permutations,
            alpha,
            seed,
        } => {
            let start = Instant::now();
            let method = match method.as_str() {
                "pairwise" => FactorizationMethod::PairwiseTwoVariable,
                _ => FactorizationMethod::Lancaster,
            };
            let config = PermutationConfig::new(permutations, alpha, seed);
            config.validate()?;
            let kernel = kernel_spec(&kernel, &bandwidth)?;
            let sample = io::read_sample(&input, &ColumnSpec::parse(&vars)?)?;
            if sample.num_variables() != 3 {
                return Err(Error::invalid("factorize needs exactly three variables"));
            }
            let grams = GramSet::from_sample(&sample, &kernel)?;
            let composite = inference::factorization_test_grams(&grams, method, &config)?;
            let tests = composite
                .results
                .iter()
                .zip(&composite.rejected)
                .map(|(r, rej)| SubTestJson {
                    hypothesis: r.hypothesis.name(),
                    statistic: r.statistic,
                    p_value: r.p_value,
                    reject_holm: *rej,
                })
                .collect();
            to_json(&FactorizeJson {
                method: match method {
                    FactorizationMethod::Lancaster => "lancaster",
                    FactorizationMethod::PairwiseTwoVariable => "pairwise",
                },
                tests,
                sorted_p_values: composite.sorted_p_values.clone(),
                factorization_rejected: composite.factorization_rejected,
                permutations,
                alpha,
                seed,
                bandwidths: grams.bandwidths().to_vec(),
                n: sample.n(),
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            })
            .map(Outcome::ok)
        }
        Command::Bench {
            dataset: name,
            dims,
            n,
            trials,
            permutations,
            alpha,
            tests,
            seed,
            no_timing,
            out,
        } => {
            let mut config = BenchConfig::new(dataset(&name)?, bench::parse_dims(&dims)?, BenchTest::parse_list(&tests)?);
            config.n = n;
            config.trials = trials;
            config.permutations = permutations;
            config.alpha = alpha;
            config.seed = seed;
            config.record_timing = !no_timing;
            let rows = bench::run_bench(&config)?;
            match out {
                Some(path) => {
                    bench::write_rows(&path, &rows)?;
                    Ok(Outcome::ok(String::new()))
                }
                None => {
                    let mut buf = Vec::new();
                    bench::write_rows_to(&mut buf, &rows)?;
                    Ok(Outcome::ok(String::from_utf8(buf).expect("ascii")))
                }
            }
        }
        Command::Selfcheck { seed, corrupt_centering } => {
            let report = selfcheck::run(SelfcheckOptions {
                corrupt_centering,
                seed,
                ..Default::default()
            });
            Ok(Outcome {
                stdout: format!("{report}\n"),
                success: report.passed(),
            })
        }
    }
}

/// Parses `args` (including the program name), runs the command, and writes
/// its output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(if code == 0 { stdout as &mut dyn Write } else { stderr as &mut dyn Write }, "{e}");
            return code;
        }
    };
    match execute(cli) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            i32::from(!outcome.success)
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
