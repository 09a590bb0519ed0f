//! Dense row-major matrix type and the operations the rest of the crate
//! builds on: arithmetic, norms, numerical rank, and the right generalized
//! inverse.
//!
//! Design notes:
//! - Storage is a flat `Vec<f64>` in row-major order; entry (i, j) lives at
//!   `i * cols + j`.
//! - Construction validates dimensions and finiteness once, so arithmetic can
//!   assume well-formed operands. Shape mismatches in arithmetic are
//!   programming errors and panic; fallible analysis entry points validate
//!   shapes first and return [`Error`](crate::Error) values instead.
//! - Numerical rank is decided from singular values with a relative cutoff,
//!   never from elimination pivots.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::linalg::svd::singular_values;

/// Dense matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Outcome of a numerical rank decision.
///
/// `rank` counts the singular values strictly above `tolerance_used`;
/// `singular_values` are sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
}

impl Matrix {
    /// Builds a matrix from row-major data, validating the shape and that
    /// every entry is finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (idx, &x) in data.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidShape("no rows given".into()));
        }
        let cols = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidShape(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    /// All-zero matrix. Panics if a dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`. Panics if `n` is zero.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major view of the entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self[(i, j)] = value;
    }

    /// Contiguous slice holding row `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.rows, "row index out of range");
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Copy of column `j`.
    pub fn col(&self, j: usize) -> Vec<f64> {
        assert!(j < self.cols, "column index out of range");
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product. Panics if the inner dimensions differ.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: inner dimensions differ ({}x{} * {}x{})",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product. Panics if `x.len() != cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec: length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Entrywise difference. Panics on shape mismatch.
    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shape mismatch");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Operator infinity norm: the maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    /// Infinity norm of `self - self^T`; zero for symmetric matrices.
    pub fn asymmetry(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.sub(&self.transpose()).norm_inf()
    }

    /// Numerical rank from singular values.
    ///
    /// The cutoff is `rel_tol * sigma_max` with a default
    /// `rel_tol = max(rows, cols) * EPSILON`. A zero matrix has rank 0 and
    /// reports machine epsilon as the tolerance actually used. `rel_tol`
    /// must lie strictly between 0 and 1.
    pub fn rank(&self, rel_tol: Option<f64>) -> Result<RankResult> {
        let rel = match rel_tol {
            Some(t) => {
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::InvalidTolerance(t));
                }
                t
            }
            None => self.rows.max(self.cols) as f64 * f64::EPSILON,
        };
        let sigma = singular_values(self)?;
        let sigma_max = sigma.first().copied().unwrap_or(0.0);
        let tolerance_used = if sigma_max > 0.0 {
            rel * sigma_max
        } else {
            f64::EPSILON
        };
        let rank = sigma.iter().filter(|&&s| s > tolerance_used).count();
        Ok(RankResult {
            rank,
            singular_values: sigma,
            tolerance_used,
        })
    }

    /// Right generalized inverse `M^T (M M^T)^-1` of a full-row-rank matrix,
    /// computed through a Cholesky solve of the Gram matrix rather than an
    /// explicit inverse.
    ///
    /// Fails with [`Error::RankDeficient`] when the numerical rank of `self`
    /// is below the row count.
    pub fn right_pseudo_inverse(&self) -> Result<Matrix> {
        let rank = self.rank(None)?;
        if rank.rank < self.rows {
            return Err(Error::RankDeficient {
                rank: rank.rank,
                required: self.rows,
            });
        }
        let gram = self.matmul(&self.transpose());
        // P^T = (M^T G^-1)^T = G^-1 M because the Gram matrix is symmetric.
        let p_t = cholesky_solve(&gram, self).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } => Error::RankDeficient {
                rank: rank.rank,
                required: self.rows,
            },
            other => other,
        })?;
        Ok(p_t.transpose())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Solves `G X = RHS` for symmetric positive definite `G` via a Cholesky
/// factorization `G = L L^T`.
pub(crate) fn cholesky_solve(g: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    assert!(g.is_square(), "cholesky_solve: G must be square");
    assert_eq!(g.rows(), rhs.rows(), "cholesky_solve: shape mismatch");
    let n = g.rows();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[(i, j)];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite { pivot: i });
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    // Forward substitution L Y = RHS, then back substitution L^T X = Y,
    // column by column.
    let mut x = rhs.clone();
    for c in 0..rhs.cols() {
        for i in 0..n {
            let mut sum = x[(i, c)];
            for k in 0..i {
                sum -= l[i * n + k] * x[(k, c)];
            }
            x[(i, c)] = sum / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = x[(i, c)];
            for k in i + 1..n {
                sum -= l[k * n + i] * x[(k, c)];
            }
            x[(i, c)] = sum / l[i * n + i];
        }
    }
    Ok(x)
}
