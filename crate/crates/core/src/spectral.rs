//! Singular subspace projectors.
//!
//! [`spectral_split`] separates the k smallest singular values of a square
//! matrix from the rest and returns the orthogonal projectors onto the
//! corresponding left and right singular subspaces, U_k U_k^T and V_k V_k^T.
//! Individual singular vectors are only defined up to sign (or rotation
//! inside a repeated singular value), but the projectors are unique as long
//! as the split has a positive gap, which is why a degenerate split is an
//! error rather than an arbitrary choice.
//!
//! [`ideal_projector`] gives the same projectors for an unperturbed
//! block-decoupled chain in closed form: the right one is block-constant with
//! entries 1/|S_i|, the left one is the direct sum of u_i u_i^T for the unit
//! l2-norm stationary vector u_i of each block.

use nalgebra::{DMatrix, DVector};

use crate::chain::DecoupledChain;
use crate::error::{Error, Result};
use crate::matrix::{check_irreducible, Matrix};

/// Default minimum gap between sigma_k and sigma_{k+1}.
pub const DEFAULT_GAP_TOL: f64 = 1e-10;

/// The k smallest singular values of a matrix with the associated projectors.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub k: usize,
    /// Ascending.
    pub small_sigmas: Vec<f64>,
    /// Ascending.
    pub large_sigmas: Vec<f64>,
    /// P_k^L = U_k U_k^T.
    pub p_left: Matrix,
    /// P_k^R = V_k V_k^T.
    pub p_right: Matrix,
    /// min(large) - max(small).
    pub gap: f64,
    /// Left singular vectors of the small singular values, as columns.
    pub u_k: Matrix,
    /// Right singular vectors of the small singular values, as columns.
    pub v_k: Matrix,
}

/// Which singular subspace drives a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    #[default]
    Right,
}

impl SpectralSplit {
    pub fn projector(&self, side: Side) -> &Matrix {
        match side {
            Side::Left => &self.p_left,
            Side::Right => &self.p_right,
        }
    }
}

/// The closed-form projectors of an unperturbed chain.
#[derive(Clone, Debug)]
pub struct IdealProjectorPair {
    pub p_left: Matrix,
    pub p_right: Matrix,
    /// Per block, the positive stationary vector with unit l2-norm (indexed
    /// locally within the block).
    pub stationary: Vec<Vec<f64>>,
}

impl IdealProjectorPair {
    pub fn projector(&self, side: Side) -> &Matrix {
        match side {
            Side::Left => &self.p_left,
            Side::Right => &self.p_right,
        }
    }
}

/// S(A) = [[0, A], [A^T, 0]].
pub fn symmetrize(a: &Matrix) -> Result<Matrix> {
    a.require_square("symmetrize")?;
    let n = a.rows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            s[(i, n + j)] = a[(i, j)];
            s[(n + j, i)] = a[(i, j)];
        }
    }
    Ok(Matrix::from_dmatrix_unchecked(s))
}

/// Full SVD with singular values sorted ascending (stable, ties by index).
/// Returns (sigmas, U, V) with columns permuted accordingly.
pub(crate) fn sorted_svd(m: &Matrix) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let a = m.as_dmatrix();
    let fm = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let svd = fm
        .svd()
        .map_err(|e| Error::Domain(format!("SVD did not converge: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let len = a.nrows().min(a.ncols());
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let sigmas = order.iter().map(|&i| s[i].max(0.0)).collect();
    let u = DMatrix::from_fn(a.nrows(), len, |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(a.ncols(), len, |r, c| v[(r, order[c])]);
    Ok((sigmas, u, v))
}

/// Splits off the k smallest singular values of a square matrix.
pub fn spectral_split(m: &Matrix, k: usize, gap_tol: f64) -> Result<SpectralSplit> {
    m.require_square("spectral_split")?;
    let n = m.rows();
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let (sigmas, u, v) = sorted_svd(m)?;
    let gap = sigmas[k] - sigmas[k - 1];
    if !(gap >= gap_tol) {
        return Err(Error::DegenerateGap {
            lower: sigmas[k - 1],
            upper: sigmas[k],
            gap,
            tol: gap_tol,
        });
    }
    let u_k = u.columns(0, k).into_owned();
    let v_k = v.columns(0, k).into_owned();
    let p_left = &u_k * u_k.transpose();
    let p_right = &v_k * v_k.transpose();
    Ok(SpectralSplit {
        k,
        small_sigmas: sigmas[..k].to_vec(),
        large_sigmas: sigmas[k..].to_vec(),
        p_left: Matrix::from_dmatrix_unchecked(p_left),
        p_right: Matrix::from_dmatrix_unchecked(p_right),
        gap,
        u_k: Matrix::from_dmatrix_unchecked(u_k),
        v_k: Matrix::from_dmatrix_unchecked(v_k),
    })
}

/// Eigenprojector of a symmetric matrix onto the k eigenvalues smallest in
/// absolute value. Also returns all eigenvalues ordered by |lambda|.
pub fn symmetric_eigenprojector(a: &Matrix, k: usize) -> Result<(Matrix, Vec<f64>)> {
    a.require_square("symmetric_eigenprojector")?;
    let n = a.rows();
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds n = {n}")));
    }
    let eig = a.as_dmatrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].abs().total_cmp(&eig.eigenvalues[y].abs()));
    let basis = DMatrix::from_fn(n, k, |r, c| eig.eigenvectors[(r, order[c])]);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    Ok((Matrix::from_dmatrix_unchecked(&basis * basis.transpose()), values))
}

/// Closed-form P^L(0), P^R(0) of a decoupled chain.
pub fn ideal_projector(chain: &DecoupledChain) -> Result<IdealProjectorPair> {
    let n = chain.n();
    let mut p_left = DMatrix::zeros(n, n);
    let mut p_right = DMatrix::zeros(n, n);
    let mut stationary = Vec::with_capacity(chain.k());
    for (b, block) in chain.partition().blocks().iter().enumerate() {
        let t = chain.block(b);
        if !check_irreducible(&t)? {
            return Err(Error::Domain(format!("block {b} is not irreducible")));
        }
        let u = stationary_unit(&t)?;
        let w = 1.0 / block.len() as f64;
        for (r, &i) in block.iter().enumerate() {
            for (c, &j) in block.iter().enumerate() {
                p_left[(i, j)] = u[r] * u[c];
                p_right[(i, j)] = w;
            }
        }
        stationary.push(u);
    }
    Ok(IdealProjectorPair {
        p_left: Matrix::from_dmatrix_unchecked(p_left),
        p_right: Matrix::from_dmatrix_unchecked(p_right),
        stationary,
    })
}

/// Positive left Perron vector of an irreducible stochastic matrix,
/// normalized to unit l2-norm.
pub fn stationary_unit(t: &Matrix) -> Result<Vec<f64>> {
    let n = t.rows();
    let pi = solve_stationary(t).unwrap_or_else(|| power_stationary(t));
    if pi.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("stationary vector is not strictly positive".into()));
    }
    let norm = pi.norm();
    Ok((0..n).map(|i| pi[i] / norm).collect())
}

/// Solves pi^T (T - I) = 0 with the last equation replaced by sum(pi) = 1.
fn solve_stationary(t: &Matrix) -> Option<DVector<f64>> {
    let n = t.rows();
    let mut a = t.as_dmatrix().transpose() - DMatrix::identity(n, n);
    let mut rhs = DVector::zeros(n);
    a.row_mut(n - 1).fill(1.0);
    rhs[n - 1] = 1.0;
    let pi = a.clone().lu().solve(&rhs)?;
    let residual = (&a * &pi - &rhs).amax();
    (pi.iter().all(|v| v.is_finite()) && residual <= 1e-10).then_some(pi)
}

/// Power iteration on the lazy chain (I + T)/2, which shares the stationary
/// vector of T and is aperiodic.
fn power_stationary(t: &Matrix) -> DVector<f64> {
    let n = t.rows();
    let lazy = (t.as_dmatrix().transpose() + DMatrix::identity(n, n)) * 0.5;
    let mut pi = DVector::from_element(n, 1.0 / n as f64);
    for _ in 0..100_000 {
        let next = &lazy * &pi;
        let next = &next / next.sum();
        let delta = (&next - &pi).amax();
        pi = next;
        if delta < 1e-12 {
            break;
        }
    }
    pi
}
