//! Recovering the blocks of a perturbed block-decoupled Markov chain from the
//! singular subspaces of its Laplacian I - T(x).
//!
//! Given T(x) = T_0 + xE where T_0 is a direct sum of irreducible stochastic
//! blocks, the orthogonal projector onto the right singular subspace of the k
//! smallest singular values of I - T(x) is close to the block-constant
//! projector of T_0. Columns of the same block are then close to each other
//! and columns of different blocks are far apart, which is what the
//! algorithms in [`recovery`] threshold on.
//!
//! Modules:
//!
//! * [`matrix`], [`chain`], [`io`]: dense matrices, generators, file formats;
//! * [`spectral`]: symmetrization and singular subspace projectors;
//! * [`bounds`]: the eps budget, x-thresholds, and numerical certificates;
//! * [`recovery`]: exact, empirical-threshold, and approximate recovery;
//! * [`experiment`]: seeded sweeps and bound-verification campaigns.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod io;
pub mod matrix;
pub mod recovery;
pub mod spectral;
mod union_find;

pub use error::{Error, Result};
pub use exec::Execution;
pub use matrix::{ClusterPartition, Matrix};
