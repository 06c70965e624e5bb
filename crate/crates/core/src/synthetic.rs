//! Benchmark distributions and an exact oracle for discrete populations.
//!
//! Every generator is a deterministic function of `(n, p, seed)`. Each
//! variable block (and each auxiliary draw, such as branch choices) reads its
//! own substream, so changing one block's construction never shifts another's.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::gram::RealMatrix;
use crate::hypothesis::{HypothesisKind, Variable};
use crate::kernels::{KernelSpec, VariableBlock};
use crate::rng::{stream, StreamRng};
use crate::sample::Sample;
use crate::stats::expansion_coefficients;

const STREAM_X: u64 = 0;
const STREAM_Y: u64 = 1;
const STREAM_W: u64 = 2;
const STREAM_Z_NOISE: u64 = 3;
const STREAM_BRANCH: u64 = 4;
const STREAM_EPS: u64 = 5;
const STREAM_CELLS: u64 = 6;

/// Mean of the exponential magnitude `W` in Dataset A.
pub const DATASET_A_W_MEAN: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Standard deviation of the additive noise in Dataset B.
pub const DATASET_B_NOISE_SD: f64 = 0.1;

fn check_dims(n: usize, p: usize) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::invalid(format!("need n ≥ 1 and p ≥ 1, got n = {n}, p = {p}")));
    }
    Ok(())
}

fn gaussian_block(n: usize, p: usize, rng: &mut StreamRng) -> Result<VariableBlock> {
    let data = (0..n * p).map(|_| StandardNormal.sample(rng)).collect();
    Ok(VariableBlock::new(RealMatrix::new(n, p, data)?))
}

/// `Z` whose first coordinate is `first[i]` and whose remaining `p - 1`
/// coordinates are independent standard normals.
fn z_block(first: Vec<f64>, p: usize, seed: u64) -> Result<VariableBlock> {
    let n = first.len();
    let mut noise = stream(seed, STREAM_Z_NOISE);
    let mut data = Vec::with_capacity(n * p);
    for z1 in first {
        data.push(z1);
        for _ in 1..p {
            data.push(StandardNormal.sample(&mut noise));
        }
    }
    Ok(VariableBlock::new(RealMatrix::new(n, p, data)?))
}

/// Pairwise independent, jointly dependent triple: `X, Y ~ N(0, I_p)`,
/// `Z₁ = sign(X₁Y₁)·W` with `W` exponential of mean `1/√2`, `Z₂:ₚ ~ N(0, I)`.
pub fn gen_dataset_a(n: usize, p: usize, seed: u64) -> Result<Sample> {
    check_dims(n, p)?;
    let x = gaussian_block(n, p, &mut stream(seed, STREAM_X))?;
    let y = gaussian_block(n, p, &mut stream(seed, STREAM_Y))?;
    let w = Exp::new(1.0 / DATASET_A_W_MEAN).expect("positive rate");
    let mut w_rng = stream(seed, STREAM_W);
    let first = (0..n)
        .map(|i| {
            let magnitude: f64 = w.sample(&mut w_rng);
            (x.point(i)[0] * y.point(i)[0]).signum() * magnitude
        })
        .collect();
    Sample::triple(x, y, z_block(first, p, seed)?)
}

/// Which expression generated a Dataset B row's `Z₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetBBranch {
    XSquared,
    YSquared,
    Product,
}

/// Branch choices of [`gen_dataset_b`] for `(n, seed)`; drawn from their own substream.
pub fn dataset_b_branches(n: usize, seed: u64) -> Vec<DatasetBBranch> {
    let mut rng = stream(seed, STREAM_BRANCH);
    (0..n)
        .map(|_| match rng.random_range(0..3u8) {
            0 => DatasetBBranch::XSquared,
            1 => DatasetBBranch::YSquared,
            _ => DatasetBBranch::Product,
        })
        .collect()
}

/// Joint dependence easier to see than pairwise: `Z₁` is `X₁² + ε`, `Y₁² + ε`
/// or `X₁Y₁ + ε` with probability 1/3 each, `ε ~ N(0, 0.1²)`.
pub fn gen_dataset_b(n: usize, p: usize, seed: u64) -> Result<Sample> {
    check_dims(n, p)?;
    let x = gaussian_block(n, p, &mut stream(seed, STREAM_X))?;
    let y = gaussian_block(n, p, &mut stream(seed, STREAM_Y))?;
    let noise = Normal::new(0.0, DATASET_B_NOISE_SD).expect("valid noise");
    let mut eps = stream(seed, STREAM_EPS);
    let first = dataset_b_branches(n, seed)
        .into_iter()
        .enumerate()
        .map(|(i, branch)| {
            let (x1, y1) = (x.point(i)[0], y.point(i)[0]);
            let base = match branch {
                DatasetBBranch::XSquared => x1 * x1,
                DatasetBBranch::YSquared => y1 * y1,
                DatasetBBranch::Product => x1 * y1,
            };
            base + noise.sample(&mut eps)
        })
        .collect();
    Sample::triple(x, y, z_block(first, p, seed)?)
}

/// Mutually independent standard normal `X`, `Y`, `Z` in `ℝᵖ`.
pub fn gen_null(n: usize, p: usize, seed: u64) -> Result<Sample> {
    check_dims(n, p)?;
    Sample::triple(
        gaussian_block(n, p, &mut stream(seed, STREAM_X))?,
        gaussian_block(n, p, &mut stream(seed, STREAM_Y))?,
        gaussian_block(n, p, &mut stream(seed, STREAM_Z_NOISE))?,
    )
}

/// Finite joint distribution of three scalar variables.
///
/// `probs` is indexed as `(i·|Y| + j)·|Z| + k` for atoms `xᵢ, yⱼ, z_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    atoms: [Vec<f64>; 3],
    probs: Vec<f64>,
}

/// Probabilities of the binary counterexample table in tenths, cells ordered
/// `(0,0,0), (0,0,1), (0,1,0), …, (1,1,1)`.
pub const COUNTEREXAMPLE_TENTHS: [u8; 8] = [2, 1, 1, 1, 1, 1, 1, 2];

impl DiscreteJoint {
    pub fn new(atoms: [Vec<f64>; 3], probs: Vec<f64>) -> Result<Self> {
        if atoms.iter().any(Vec::is_empty) {
            return Err(Error::InvalidTable("every variable needs at least one atom".into()));
        }
        let cells = atoms.iter().map(Vec::len).product::<usize>();
        if probs.len() != cells {
            return Err(Error::InvalidTable(format!("{} probabilities for {cells} cells", probs.len())));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidTable(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTable(format!("probabilities sum to {total}")));
        }
        Ok(Self { atoms, probs })
    }

    /// Product of three marginals.
    pub fn product(atoms: [Vec<f64>; 3], px: &[f64], py: &[f64], pz: &[f64]) -> Result<Self> {
        let probs = px
            .iter()
            .flat_map(|a| py.iter().flat_map(move |b| pz.iter().map(move |c| a * b * c)))
            .collect();
        Self::new(atoms, probs)
    }

    /// Empirical distribution of scalar observations; atoms are the distinct
    /// observed values in increasing order.
    pub fn empirical(x: &[f64], y: &[f64], z: &[f64]) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() || x.len() != z.len() {
            return Err(Error::shape("empirical table needs equally many x, y, z values"));
        }
        let support = |v: &[f64]| {
            let mut s = v.to_vec();
            s.sort_by(f64::total_cmp);
            s.dedup();
            s
        };
        let atoms = [support(x), support(y), support(z)];
        let (ny, nz) = (atoms[1].len(), atoms[2].len());
        let mut probs = vec![0.0; atoms[0].len() * ny * nz];
        let find = |s: &[f64], v: f64| s.binary_search_by(|a| a.total_cmp(&v)).expect("observed value");
        let w = 1.0 / x.len() as f64;
        for ((a, b), c) in x.iter().zip(y).zip(z) {
            let cell = (find(&atoms[0], *a) * ny + find(&atoms[1], *b)) * nz + find(&atoms[2], *c);
            probs[cell] += w;
        }
        // Rescale away accumulated rounding before validation.
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(atoms, probs)
    }

    pub fn atoms(&self, v: Variable) -> &[f64] {
        &self.atoms[v.index()]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn shape(&self) -> [usize; 3] {
        [self.atoms[0].len(), self.atoms[1].len(), self.atoms[2].len()]
    }

    fn cell(&self, i: usize, j: usize, k: usize) -> usize {
        let [_, ny, nz] = self.shape();
        (i * ny + j) * nz + k
    }

    pub fn prob(&self, i: usize, j: usize, k: usize) -> f64 {
        self.probs[self.cell(i, j, k)]
    }

    /// Marginal of one variable over its atoms.
    pub fn marginal(&self, v: Variable) -> Vec<f64> {
        let shape = self.shape();
        let mut out = vec![0.0; shape[v.index()]];
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    out[[i, j, k][v.index()]] += self.prob(i, j, k);
                }
            }
        }
        out
    }

    /// Marginal of the pair that excludes `excluded`, as a flat table over
    /// the remaining two variables in `X, Y, Z` order.
    pub fn pair_marginal(&self, excluded: Variable) -> Vec<f64> {
        let shape = self.shape();
        let keep: Vec<usize> = (0..3).filter(|d| *d != excluded.index()).collect();
        let width = shape[keep[1]];
        let mut out = vec![0.0; shape[keep[0]] * width];
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    let idx = [i, j, k];
                    out[idx[keep[0]] * width + idx[keep[1]]] += self.prob(i, j, k);
                }
            }
        }
        out
    }

    /// Draws `n` iid observations by inverse CDF over the cells.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(Error::invalid("need n ≥ 1"));
        }
        let [_, ny, nz] = self.shape();
        let mut cumulative = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for p in &self.probs {
            acc += p;
            cumulative.push(acc);
        }
        let mut rng = stream(seed, STREAM_CELLS);
        let (mut xs, mut ys, mut zs) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let u: f64 = rng.random::<f64>() * acc;
            let cell = cumulative.partition_point(|c| *c <= u).min(self.probs.len() - 1);
            let (i, rest) = (cell / (ny * nz), cell % (ny * nz));
            xs.push(self.atoms[0][i]);
            ys.push(self.atoms[1][rest / nz]);
            zs.push(self.atoms[2][rest % nz]);
        }
        Sample::triple(
            VariableBlock::from_column(&xs)?,
            VariableBlock::from_column(&ys)?,
            VariableBlock::from_column(&zs)?,
        )
    }
}

/// The binary joint whose Lancaster interaction vanishes although no variable
/// is independent of the other two.
pub fn counterexample_table() -> DiscreteJoint {
    let probs = COUNTEREXAMPLE_TENTHS.iter().map(|t| f64::from(*t) / 10.0).collect();
    DiscreteJoint::new([vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0]], probs).expect("valid table")
}

pub fn gen_counterexample(n: usize, seed: u64) -> Result<Sample> {
    counterexample_table().sample(n, seed)
}

/// Signed measures whose exact norm [`population_norm_discrete`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationMeasure {
    /// `Δ_L P`
    Lancaster,
    /// `P - P_X P_Y P_Z`
    TotalIndependence,
    /// `P - P_{rest} P_v`, the defect of the factorization that splits off `v`.
    JointPair(Variable),
    /// `Δ₍v₎P`
    IncompleteLancaster(Variable),
}

impl PopulationMeasure {
    fn hypothesis(self) -> HypothesisKind {
        use HypothesisKind::*;
        match self {
            PopulationMeasure::Lancaster => Lancaster,
            PopulationMeasure::TotalIndependence => TotalIndep3,
            PopulationMeasure::JointPair(Variable::X) => JointPairIndepYzX,
            PopulationMeasure::JointPair(Variable::Y) => JointPairIndepXzY,
            PopulationMeasure::JointPair(Variable::Z) => JointPairIndepXyZ,
            PopulationMeasure::IncompleteLancaster(Variable::X) => IncompleteLancasterX,
            PopulationMeasure::IncompleteLancaster(Variable::Y) => IncompleteLancasterY,
            PopulationMeasure::IncompleteLancaster(Variable::Z) => IncompleteLancasterZ,
        }
    }
}

/// Exact `‖ν‖²` under `k ⊗ l ⊗ m` for a signed measure `ν` built from a finite
/// joint: `Σ_c Σ_c' ν(c) ν(c') k(x_c, x_c') l(y_c, y_c') m(z_c, z_c')` over all
/// pairs of cells. Gaussian kernels need a fixed bandwidth here.
pub fn population_norm_discrete(joint: &DiscreteJoint, kernels: &[KernelSpec; 3], measure: PopulationMeasure) -> Result<f64> {
    let coefficients = expansion_coefficients(measure.hypothesis()).expect("every population measure has an expansion");
    let shape = joint.shape();
    let [px, py, pz] = [Variable::X, Variable::Y, Variable::Z].map(|v| joint.marginal(v));
    let (pyz, pxz, pxy) = (
        joint.pair_marginal(Variable::X),
        joint.pair_marginal(Variable::Y),
        joint.pair_marginal(Variable::Z),
    );
    let mut nu = vec![0.0; joint.probs.len()];
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            for k in 0..shape[2] {
                let terms = [
                    joint.prob(i, j, k),
                    pxy[i * shape[1] + j] * pz[k],
                    pxz[i * shape[2] + k] * py[j],
                    pyz[j * shape[2] + k] * px[i],
                    px[i] * py[j] * pz[k],
                ];
                nu[joint.cell(i, j, k)] = terms.iter().zip(&coefficients).map(|(t, c)| t * c).sum();
            }
        }
    }

    let atom_gram = |d: usize| -> Result<Vec<Vec<f64>>> {
        let spec = &kernels[d];
        let sigma = match spec {
            KernelSpec::Gaussian(crate::kernels::Bandwidth::Fixed(s)) => Some(*s),
            KernelSpec::Gaussian(_) => {
                return Err(Error::invalid("population kernels need a fixed bandwidth"));
            }
            KernelSpec::Linear => None,
        };
        spec.validate()?;
        let atoms = &joint.atoms[d];
        Ok(atoms
            .iter()
            .map(|a| atoms.iter().map(|b| spec.eval(&[*a], &[*b], sigma)).collect())
            .collect())
    };
    let (gx, gy, gz) = (atom_gram(0)?, atom_gram(1)?, atom_gram(2)?);

    let mut total = 0.0;
    for i in 0..shape[0] {
        for j in 0..shape[1] {
            for k in 0..shape[2] {
                let a = nu[joint.cell(i, j, k)];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..shape[0] {
                    for j2 in 0..shape[1] {
                        for k2 in 0..shape[2] {
                            total += a * nu[joint.cell(i2, j2, k2)] * gx[i][i2] * gy[j][j2] * gz[k][k2];
                        }
                    }
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_a_signs_follow_product() {
        let s = gen_dataset_a(500, 2, 3).unwrap();
        let (x, y, z) = (&s.blocks()[0], &s.blocks()[1], &s.blocks()[2]);
        for i in 0..s.n() {
            assert_eq!(z.point(i)[0].signum(), (x.point(i)[0] * y.point(i)[0]).signum());
        }
        assert_eq!(z.d(), 2);
    }

    #[test]
    fn generators_are_seed_deterministic() {
        assert_eq!(gen_dataset_a(20, 3, 5).unwrap(), gen_dataset_a(20, 3, 5).unwrap());
        assert_eq!(gen_dataset_b(20, 3, 5).unwrap(), gen_dataset_b(20, 3, 5).unwrap());
        assert_eq!(gen_null(20, 3, 5).unwrap(), gen_null(20, 3, 5).unwrap());
        assert_ne!(gen_null(20, 3, 5).unwrap(), gen_null(20, 3, 6).unwrap());
        assert_eq!(gen_counterexample(50, 1).unwrap(), gen_counterexample(50, 1).unwrap());
    }

    #[test]
    fn null_blocks_have_requested_shape() {
        let s = gen_null(17, 4, 0).unwrap();
        assert_eq!(s.num_variables(), 3);
        assert!(s.blocks().iter().all(|b| b.n() == 17 && b.d() == 4));
        assert!(gen_null(0, 1, 0).is_err());
        assert!(gen_dataset_a(5, 0, 0).is_err());
    }

    #[test]
    fn counterexample_table_matches_printed_values() {
        let t = counterexample_table();
        assert_eq!(COUNTEREXAMPLE_TENTHS.iter().map(|t| u32::from(*t)).sum::<u32>(), 10);
        assert!((t.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(t.prob(0, 0, 0), 0.2);
        assert_eq!(t.prob(1, 1, 1), 0.2);
        assert_eq!(t.prob(0, 1, 1), 0.1);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let atoms = || [vec![0.0, 1.0], vec![0.0], vec![0.0]];
        assert!(DiscreteJoint::new(atoms(), vec![0.5, 0.4]).is_err());
        assert!(DiscreteJoint::new(atoms(), vec![1.5, -0.5]).is_err());
        assert!(DiscreteJoint::new(atoms(), vec![1.0]).is_err());
        assert!(DiscreteJoint::new(atoms(), vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn marginals_of_counterexample() {
        let t = counterexample_table();
        for v in Variable::ALL {
            let m = t.marginal(v);
            assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        }
        let pxy = t.pair_marginal(Variable::Z);
        assert!((pxy[0] - 0.3).abs() < 1e-15);
        assert!((pxy[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empirical_table_of_sample() {
        let t = DiscreteJoint::empirical(&[0.0, 1.0, 1.0, 0.0], &[1.0, 1.0, 0.0, 1.0], &[0.0; 4]).unwrap();
        assert_eq!(t.atoms(Variable::Z), &[0.0]);
        assert!((t.prob(0, 1, 0) - 0.5).abs() < 1e-15);
        assert!((t.prob(1, 0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn population_norm_needs_fixed_bandwidth() {
        let k = [KernelSpec::gaussian_median(); 3];
        assert!(population_norm_discrete(&counterexample_table(), &k, PopulationMeasure::Lancaster).is_err());
    }
}
