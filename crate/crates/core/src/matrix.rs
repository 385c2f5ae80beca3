//! Dense matrices, cluster partitions, and stochasticity checks.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Index;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A dense real matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Wraps a dense matrix, rejecting NaN and infinite entries.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension("matrix must have at least one row and column".into()));
        }
        if let Some((idx, v)) = m.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (r, c) = (idx % m.nrows(), idx / m.nrows());
            return Err(Error::Domain(format!("non-finite entry {v} at ({r}, {c})")));
        }
        Ok(Matrix(m))
    }

    /// Internal constructor for results of arithmetic on finite matrices.
    pub(crate) fn from_dmatrix_unchecked(m: DMatrix<f64>) -> Self {
        debug_assert!(m.iter().all(|v| v.is_finite()));
        Matrix(m)
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, data))
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rows have differing lengths".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(rows.len(), cols, &data)
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    /// Diagonal matrix with the given diagonal.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    /// Standard basis vector e_i of length n, as an n x 1 column.
    pub fn basis_vector(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::Parameter(format!("basis index {i} out of range for n = {n}")));
        }
        let mut m = DMatrix::zeros(n, 1);
        m[(i, 0)] = 1.0;
        Ok(Matrix(m))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    /// I - self, for square matrices.
    pub fn laplacian(&self) -> Result<Matrix> {
        self.require_square("laplacian")?;
        Ok(Matrix(DMatrix::identity(self.rows(), self.rows()) - &self.0))
    }

    /// self - other.
    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.require_same_shape(other)?;
        Ok(Matrix(&self.0 - &other.0))
    }

    /// self + scale * other.
    pub fn add_scaled(&self, scale: f64, other: &Matrix) -> Result<Matrix> {
        self.require_same_shape(other)?;
        Matrix::from_dmatrix(&self.0 + &other.0 * scale)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Operator 2-norm, computed exactly as the largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        singular_values(&self.0).into_iter().fold(0.0, f64::max)
    }

    /// Singular values in ascending order.
    pub fn singular_values_ascending(&self) -> Vec<f64> {
        let mut s = singular_values(&self.0);
        s.sort_by(f64::total_cmp);
        s
    }

    /// `true` when |a_ij - a_ji| <= tol for all i, j.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows())
                .all(|i| (0..i).all(|j| (self.0[(i, j)] - self.0[(j, i)]).abs() <= tol))
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what} requires a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    fn require_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.0.shape() == other.0.shape() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "shape {:?} vs {:?}",
                self.0.shape(),
                other.0.shape()
            )))
        }
    }
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let fm = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    // Falls back to the slower full decomposition if the values-only path
    // fails to converge.
    match fm.singular_values() {
        Ok(s) => s,
        Err(_) => m.clone().svd(false, false).singular_values.iter().copied().collect(),
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            let row: Vec<String> = self.0.row(i).iter().map(|v| format!("{v:.6}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A partition of `{0, ..., n-1}` into ordered, nonempty, disjoint blocks.
///
/// Indices inside a block are kept sorted; the order of blocks is preserved as
/// given (ground-truth partitions keep their generation order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl ClusterPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Domain("partition contains an empty block".into()));
            }
            block.sort_unstable();
            for &i in block.iter() {
                if i >= n {
                    return Err(Error::Domain(format!("index {i} out of range for n = {n}")));
                }
                if seen[i] {
                    return Err(Error::Domain(format!("index {i} appears in more than one block")));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Domain(format!("index {missing} is not covered by any block")));
        }
        Ok(ClusterPartition { n, blocks })
    }

    /// Contiguous blocks with the given sizes, in order.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut start = 0;
        let mut blocks = Vec::with_capacity(sizes.len());
        for &s in sizes {
            blocks.push((start..start + s).collect());
            start += s;
        }
        Self::new(start, blocks)
    }

    /// Groups indices by label; blocks are ordered by their smallest index.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut order: Vec<usize> = Vec::new();
        let mut groups: std::collections::HashMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            groups
                .entry(l)
                .or_insert_with(|| {
                    order.push(l);
                    Vec::new()
                })
                .push(i);
        }
        let blocks = order.into_iter().map(|l| groups.remove(&l).unwrap()).collect();
        Self::new(labels.len(), blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Block sizes n_1 >= n_2 >= ... >= n_k.
    pub fn sizes_desc(&self) -> Vec<usize> {
        let mut s = self.sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    /// `labels[i]` is the index of the block containing `i`.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                labels[i] = b;
            }
        }
        labels
    }

    /// Same partition with blocks ordered by their smallest index.
    pub fn canonical(&self) -> ClusterPartition {
        let mut blocks = self.blocks.clone();
        blocks.sort_unstable_by_key(|b| b[0]);
        ClusterPartition { n: self.n, blocks }
    }
}

/// A single stochasticity defect.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NegativeEntry { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NegativeEntry { row, col, value } => {
                write!(f, "negative entry {value:e} at ({row}, {col})")
            }
            Violation::RowSum { row, sum } => write!(f, "row {row} sums to {sum}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StochasticReport {
    pub violations: Vec<Violation>,
}

impl StochasticReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every entry is >= -tol and every row sum lies in [1-tol, 1+tol].
pub fn validate_stochastic(m: &Matrix, tol: f64) -> Result<StochasticReport> {
    m.require_square("validate_stochastic")?;
    let mut violations = Vec::new();
    for i in 0..m.rows() {
        let mut sum = 0.0;
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if v < -tol {
                violations.push(Violation::NegativeEntry { row: i, col: j, value: v });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > tol {
            violations.push(Violation::RowSum { row: i, sum });
        }
    }
    Ok(StochasticReport { violations })
}

/// Irreducibility test: the support digraph (edge i -> j iff m_ij > 0) is
/// strongly connected.
pub fn check_irreducible(m: &Matrix) -> Result<bool> {
    m.require_square("check_irreducible")?;
    if let Some(v) = m.as_dmatrix().iter().find(|v| **v < 0.0) {
        return Err(Error::Domain(format!("negative entry {v} in irreducibility test")));
    }
    let n = m.rows();
    let forward = |i: usize, j: usize| m[(i, j)] > 0.0;
    let backward = |i: usize, j: usize| m[(j, i)] > 0.0;
    Ok(reaches_all(n, forward) && reaches_all(n, backward))
}

fn reaches_all(n: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] && edge(i, j) {
                seen[j] = true;
                count += 1;
                queue.push_back(j);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Matrix::from_row_slice(1, 2, &[1.0, f64::NAN]).is_err());
        assert!(Matrix::from_row_slice(1, 1, &[f64::INFINITY]).is_err());
        assert!(Matrix::from_row_slice(2, 2, &[1.0]).is_err());
    }

    #[test]
    fn identity_is_stochastic() {
        assert!(validate_stochastic(&Matrix::identity(3), 1e-12).unwrap().is_ok());
    }

    #[test]
    fn short_row_sum_reported() {
        let report = validate_stochastic(&m(&[&[0.5, 0.5], &[0.7, 0.2]]), 1e-12).unwrap();
        assert_eq!(report.violations.len(), 1);
        match report.violations[0] {
            Violation::RowSum { row, sum } => {
                assert_eq!(row, 1);
                assert!((sum - 0.9).abs() < 1e-15);
            }
            ref v => panic!("unexpected {v}"),
        }
    }

    #[test]
    fn negative_entry_reported() {
        let report = validate_stochastic(&m(&[&[1.1, -0.1], &[0.0, 1.0]]), 1e-12).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::NegativeEntry { row: 0, col: 1, value: -0.1 }]
        );
    }

    #[test]
    fn non_square_rejected() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(validate_stochastic(&rect, 1e-12), Err(Error::Dimension(_))));
        assert!(matches!(check_irreducible(&rect), Err(Error::Dimension(_))));
    }

    #[test]
    fn irreducibility_examples() {
        assert!(check_irreducible(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap());
        assert!(!check_irreducible(&Matrix::identity(2)).unwrap());
        let cycle = m(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert!(check_irreducible(&cycle).unwrap());
        assert!(matches!(
            check_irreducible(&m(&[&[1.0, -0.5], &[0.5, 0.5]])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(ClusterPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(ClusterPartition::new(3, vec![vec![0, 1]]).is_err());
        assert!(ClusterPartition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(ClusterPartition::new(2, vec![vec![0, 5]]).is_err());
        let p = ClusterPartition::new(5, vec![vec![4, 3], vec![0, 2, 1]]).unwrap();
        assert_eq!(p.blocks()[0], vec![3, 4]);
        assert_eq!(p.sizes_desc(), vec![3, 2]);
        assert_eq!(p.labels(), vec![1, 1, 1, 0, 0]);
        assert_eq!(p.canonical().blocks()[0], vec![0, 1, 2]);
    }

    #[test]
    fn partition_from_labels() {
        let p = ClusterPartition::from_labels(&[7, 3, 7, 3, 1]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3], vec![4]]);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = Matrix::diagonal(&[3.0, -5.0, 0.5]).unwrap();
        assert!((d.spectral_norm() - 5.0).abs() < 1e-12);
        assert_eq!(d.singular_values_ascending().len(), 3);
    }
}
