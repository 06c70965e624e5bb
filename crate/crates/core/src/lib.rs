//! Kernel tests for three-variable interaction and total independence.
//!
//! Distributions are compared through RKHS embeddings of signed measures: the
//! squared norm of `P_XYZ - P_X P_Y P_Z` measures total dependence, and the
//! norm of the Lancaster interaction measure
//! `P_XYZ - P_XY P_Z - P_YZ P_X - P_XZ P_Y + 2 P_X P_Y P_Z` vanishes whenever
//! any one variable is independent of the other two. Both are estimated by
//! V-statistics computed in `O(n²)` from the three Gram matrices, and
//! calibrated by permutation.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`gram`] | dense matrices, centering, Hadamard sums |
//! | [`kernels`] | Gaussian/linear kernels, median-distance bandwidth |
//! | [`stats`] | HSIC, Lancaster, incomplete Lancaster, total independence |
//! | [`inference`] | permutation tests, Holm–Bonferroni, factorization / V-structure |
//! | [`synthetic`] | benchmark generators and an exact discrete-population oracle |
//! | [`io`] | CSV samples |
//! | [`mod@bench`] | power-curve harness |
//! | [`selfcheck`] | end-to-end identity and oracle checks |
//!
//! ```
//! use lancaster::{inference, kernels::KernelSpec, synthetic};
//!
//! let sample = synthetic::gen_dataset_a(200, 1, 7).unwrap();
//! let config = inference::PermutationConfig::new(100, 0.05, 7);
//! let result = inference::permutation_test(
//!     &sample,
//!     lancaster::HypothesisKind::JointPairIndepXyZ,
//!     &KernelSpec::gaussian_median(),
//!     inference::StatisticKind::Lancaster,
//!     &config,
//! )
//! .unwrap();
//! assert!(result.p_value > 0.0 && result.p_value <= 1.0);
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod gram;
pub mod hypothesis;
pub mod inference;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod rng;
pub mod sample;
pub mod selfcheck;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use gram::{GramMatrix, RealMatrix};
pub use hypothesis::{HypothesisKind, Variable};
pub use inference::{CompositeResult, FactorizationMethod, PermutationConfig, StatisticKind, TestResult};
pub use kernels::{KernelSpec, VariableBlock};
pub use sample::Sample;
