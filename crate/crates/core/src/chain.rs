//! Block-decoupled chains and admissible perturbations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{check_irreducible, validate_stochastic, ClusterPartition, Matrix};

/// Row-sum tolerance for freshly generated matrices.
pub const GENERATION_TOL: f64 = 1e-12;
/// Row-sum tolerance after arithmetic on generated matrices.
pub const ARITHMETIC_TOL: f64 = 1e-10;

/// RNG stream reserved for the cross-block matrix of a perturbation, so that
/// the perturbation never replays the block stream of the same seed.
const PERTURBATION_STREAM: u64 = 1;

/// A transition matrix T_0 = T_1 (+) ... (+) T_k together with its blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoupledChain {
    matrix: Matrix,
    partition: ClusterPartition,
}

impl DecoupledChain {
    /// Validates stochasticity, zero off-block entries, and irreducibility
    /// of every diagonal block.
    pub fn new(matrix: Matrix, partition: ClusterPartition) -> Result<Self> {
        matrix.require_square("decoupled chain")?;
        if matrix.rows() != partition.n() {
            return Err(Error::Dimension(format!(
                "matrix is {n}x{n} but partition covers {}",
                partition.n(),
                n = matrix.rows()
            )));
        }
        let report = validate_stochastic(&matrix, GENERATION_TOL)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::Domain(format!("not stochastic: {v}")));
        }
        let labels = partition.labels();
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                if labels[i] != labels[j] && matrix[(i, j)] != 0.0 {
                    return Err(Error::Domain(format!(
                        "nonzero entry {} at ({i}, {j}) between blocks",
                        matrix[(i, j)]
                    )));
                }
            }
        }
        for (b, block) in partition.blocks().iter().enumerate() {
            if !check_irreducible(&principal_submatrix(&matrix, block))? {
                return Err(Error::Domain(format!("block {b} is not irreducible")));
            }
        }
        Ok(DecoupledChain { matrix, partition })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    /// The diagonal block T_b.
    pub fn block(&self, b: usize) -> Matrix {
        principal_submatrix(&self.matrix, &self.partition.blocks()[b])
    }
}

/// Principal submatrix on the given (sorted) index set.
pub fn principal_submatrix(m: &Matrix, idx: &[usize]) -> Matrix {
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
    Matrix::from_dmatrix_unchecked(sub)
}

/// The triple (T_0, E, x_max) with T(x) = T_0 + xE stochastic on [0, x_max].
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationInstance {
    base: DecoupledChain,
    e: Matrix,
    x_max: f64,
}

impl PerturbationInstance {
    /// Checks zero row sums of `e` and stochasticity of T(x_max).
    pub fn new(base: DecoupledChain, e: Matrix, x_max: f64) -> Result<Self> {
        if !(x_max > 0.0 && x_max.is_finite()) {
            return Err(Error::Parameter(format!("x_max must be positive, got {x_max}")));
        }
        if e.rows() != base.n() || e.cols() != base.n() {
            return Err(Error::Dimension("perturbation shape differs from base chain".into()));
        }
        for i in 0..e.rows() {
            let s: f64 = (0..e.cols()).map(|j| e[(i, j)]).sum();
            if s.abs() > GENERATION_TOL {
                return Err(Error::Domain(format!("row {i} of E sums to {s:e}, not 0")));
            }
        }
        let top = base.matrix().add_scaled(x_max, &e)?;
        let report = validate_stochastic(&top, ARITHMETIC_TOL)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::Domain(format!("T(x_max) is not stochastic: {v}")));
        }
        Ok(PerturbationInstance { base, e, x_max })
    }

    pub fn base(&self) -> &DecoupledChain {
        &self.base
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    /// ||E||_2.
    pub fn norm_e(&self) -> f64 {
        self.e.spectral_norm()
    }

    /// sigma_{n-k}(I - T_0): the (k+1)-th smallest singular value of the
    /// unperturbed Laplacian.
    pub fn sigma_gap(&self) -> f64 {
        let lap = self.base.matrix().laplacian().expect("square");
        lap.singular_values_ascending()[self.k().min(self.n() - 1)]
    }

    /// T(x) = T_0 + xE.
    pub fn transition_at(&self, x: f64) -> Result<Matrix> {
        transition_at(self, x)
    }
}

/// Samples a block-decoupled chain. Every within-block entry is at least
/// `min_entry`, so every block is strictly positive and hence irreducible.
pub fn generate_decoupled(sizes: &[usize], seed: u64, min_entry: f64) -> Result<DecoupledChain> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Parameter("block sizes must be a nonempty list of positive integers".into()));
    }
    let largest = *sizes.iter().max().unwrap();
    if !(min_entry >= 0.0) || min_entry * largest as f64 >= 1.0 {
        return Err(Error::Parameter(format!(
            "min_entry {min_entry} must be in [0, 1/{largest})"
        )));
    }
    let partition = ClusterPartition::from_sizes(sizes)?;
    let n = partition.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = DMatrix::zeros(n, n);
    for block in partition.blocks() {
        for &i in block {
            let row = sample_stochastic_row(&mut rng, block.len(), min_entry);
            for (&j, v) in block.iter().zip(row) {
                t[(i, j)] = v;
            }
        }
    }
    DecoupledChain::new(Matrix::from_dmatrix(t)?, partition)
}

/// Builds E = Q - T_0 from a dense row-stochastic Q, so that
/// T(x) = (1 - x) T_0 + x Q is stochastic on [0, 1].
pub fn generate_perturbation(base: &DecoupledChain, seed: u64) -> Result<PerturbationInstance> {
    let n = base.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PERTURBATION_STREAM);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, v) in sample_stochastic_row(&mut rng, n, 0.0).into_iter().enumerate() {
            q[(i, j)] = v;
        }
    }
    let e = Matrix::from_dmatrix(q - base.matrix().as_dmatrix())?;
    PerturbationInstance::new(base.clone(), e, 1.0)
}

/// T_0 + x E for x in [0, x_max].
pub fn transition_at(inst: &PerturbationInstance, x: f64) -> Result<Matrix> {
    if !(0.0..=inst.x_max).contains(&x) {
        return Err(Error::Parameter(format!(
            "x = {x} outside [0, {}]",
            inst.x_max
        )));
    }
    inst.base.matrix().add_scaled(x, &inst.e)
}

/// `len` positive values summing to one, each at least `floor`.
fn sample_stochastic_row(rng: &mut ChaCha8Rng, len: usize, floor: f64) -> Vec<f64> {
    // 1 - U[0,1) lies in (0, 1], so every draw is strictly positive.
    let raw: Vec<f64> = (0..len).map(|_| 1.0 - rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - floor * len as f64;
    raw.into_iter().map(|v| floor + free * v / total).collect()
}
