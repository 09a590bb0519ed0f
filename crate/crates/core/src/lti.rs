//! Linear time-invariant state-space systems and the Kalman rank tests.
//!
//! A system is the triple (A, B, C) of x' = A x + B u, y = C x. Complete
//! controllability is decided by the rank of [B, AB, ..., A^(n-1) B] and
//! complete observability by the rank of the analogous block matrix of the
//! dual system (A^T, C^T, B^T); the two tests are exchanged by duality.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, RankResult};

/// State-space system x' = A x + B u, y = C x.
///
/// Invariants established at construction: `a` is n x n, `b` is n x r,
/// `c` is p x n, all entries finite, and `labels` (when present) has one
/// name per state.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiSystem {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub labels: Option<Vec<String>>,
}

/// Which rank test an [`AnalysisReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    Controllability,
    Observability,
}

/// Evidence backing a controllability or observability verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub kind: AnalysisKind,
    pub state_dim: usize,
    /// Shape of the block test matrix whose rank was computed.
    pub test_matrix_dims: (usize, usize),
    pub rank: RankResult,
    /// True when the test matrix has full rank `state_dim`.
    pub verdict: bool,
}

impl LtiSystem {
    /// Validates shapes: `a` square n x n, `b` with n rows, `c` with n columns.
    pub fn new(a: Matrix, b: Matrix, c: Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "LtiSystem input matrix",
                expected: format!("{n} rows"),
                got: format!("{} rows", b.rows()),
            });
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch {
                op: "LtiSystem observation matrix",
                expected: format!("{n} columns"),
                got: format!("{} columns", c.cols()),
            });
        }
        Ok(LtiSystem {
            a,
            b,
            c,
            labels: None,
        })
    }

    /// Attaches one label per state.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.state_dim() {
            return Err(Error::DimensionMismatch {
                op: "state labels",
                expected: format!("{} labels", self.state_dim()),
                got: format!("{} labels", labels.len()),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    /// The dual system (A^T, C^T, B^T). Applying it twice returns the
    /// original system exactly.
    pub fn dual(&self) -> LtiSystem {
        LtiSystem {
            a: self.a.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
            labels: self.labels.clone(),
        }
    }

    /// Controllability test matrix [B, AB, ..., A^(n-1) B] of shape n x (n r).
    pub fn controllability_matrix(&self) -> Matrix {
        krylov_matrix(&self.a, &self.b, self.state_dim())
    }

    /// Observability test matrix [C^T, A^T C^T, ..., (A^T)^(n-1) C^T] of
    /// shape n x (n p). Built exactly like the controllability matrix of the
    /// dual system.
    pub fn observability_matrix(&self) -> Matrix {
        krylov_matrix(&self.a.transpose(), &self.c.transpose(), self.state_dim())
    }

    /// Kalman controllability test: full rank of the block test matrix.
    pub fn is_controllable(&self, rel_tol: Option<f64>) -> Result<AnalysisReport> {
        let w = self.controllability_matrix();
        let rank = w.rank(rel_tol)?;
        Ok(AnalysisReport {
            kind: AnalysisKind::Controllability,
            state_dim: self.state_dim(),
            test_matrix_dims: (w.rows(), w.cols()),
            verdict: rank.rank == self.state_dim(),
            rank,
        })
    }

    /// Kalman observability test, evaluated through the dual construction.
    pub fn is_observable(&self, rel_tol: Option<f64>) -> Result<AnalysisReport> {
        let v = self.observability_matrix();
        let rank = v.rank(rel_tol)?;
        Ok(AnalysisReport {
            kind: AnalysisKind::Observability,
            state_dim: self.state_dim(),
            test_matrix_dims: (v.rows(), v.cols()),
            verdict: rank.rank == self.state_dim(),
            rank,
        })
    }
}

/// Block matrix [B, AB, A^2 B, ..., A^(blocks-1) B], built by repeated
/// left-multiplication so no matrix power is formed twice.
pub fn krylov_matrix(a: &Matrix, b: &Matrix, blocks: usize) -> Matrix {
    assert!(a.is_square(), "krylov_matrix: A must be square");
    assert_eq!(a.rows(), b.rows(), "krylov_matrix: A and B row counts differ");
    assert!(blocks > 0, "krylov_matrix: need at least one block");
    let n = a.rows();
    let r = b.cols();
    let mut out = Matrix::zeros(n, r * blocks);
    let mut block = b.clone();
    for j in 0..blocks {
        if j > 0 {
            block = a.matmul(&block);
        }
        for row in 0..n {
            for col in 0..r {
                out[(row, j * r + col)] = block[(row, col)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compartmental::{gen_chain, ChainSpec};

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn chain3(k: f64) -> LtiSystem {
        gen_chain(&ChainSpec::new(3, k).unwrap())
    }

    #[test]
    fn construction_checks_shapes() {
        let a = Matrix::identity(3);
        assert!(matches!(
            LtiSystem::new(mat(&[&[1.0, 2.0]]), a.clone(), a.clone()),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            LtiSystem::new(a.clone(), Matrix::identity(2), a.clone()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            LtiSystem::new(a.clone(), a.clone(), Matrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        let sys = LtiSystem::new(a.clone(), a.clone(), a).unwrap();
        assert!(sys.with_labels(vec!["X1".into()]).is_err());
    }

    #[test]
    fn krylov_blocks_are_powers_applied_to_b() {
        let sys = chain3(1.0);
        let w = sys.controllability_matrix();
        assert_eq!((w.rows(), w.cols()), (3, 9));
        // Blocks: I, A, A^2; row 0 of A^2 is (2, -3, 1).
        let expect_row0 = [1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 2.0, -3.0, 1.0];
        for (j, e) in expect_row0.iter().enumerate() {
            assert!((w[(0, j)] - e).abs() < 1e-15);
        }
    }

    #[test]
    fn full_input_chain_is_controllable() {
        let report = chain3(1.0).is_controllable(None).unwrap();
        assert!(report.verdict);
        assert_eq!(report.rank.rank, 3);
        assert_eq!(report.kind, AnalysisKind::Controllability);
        assert_eq!(report.test_matrix_dims, (3, 9));
    }

    #[test]
    fn rank_two_input_matrix_defeats_controllability() {
        let mut sys = chain3(1.0);
        sys.b = mat(&[&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]]);
        let w = sys.controllability_matrix();
        let expect = [
            [1.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0],
        ];
        for i in 0..3 {
            for j in 0..9 {
                assert!((w[(i, j)] - expect[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
        let report = sys.is_controllable(None).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.rank.rank, 2);
    }

    #[test]
    fn zero_input_matrix_has_rank_zero() {
        let mut sys = chain3(1.0);
        sys.b = Matrix::zeros(3, 3);
        let report = sys.is_controllable(None).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.rank.rank, 0);
        assert_eq!(report.rank.tolerance_used, f64::EPSILON);
    }

    #[test]
    fn adjacent_pair_sensors_are_observing() {
        let mut sys = chain3(1.0);
        sys.c = mat(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]);
        let v = sys.observability_matrix();
        assert_eq!((v.rows(), v.cols()), (3, 6));
        let expect = [
            [1.0, 0.0, 0.0, 1.0, -1.0, -2.0],
            [1.0, 1.0, -1.0, -1.0, 3.0, 3.0],
            [0.0, 1.0, 1.0, 0.0, -2.0, -1.0],
        ];
        for i in 0..3 {
            for j in 0..6 {
                assert!((v[(i, j)] - expect[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
        let report = sys.is_observable(None).unwrap();
        assert!(report.verdict);
        assert_eq!(report.rank.rank, 3);
        assert_eq!(report.kind, AnalysisKind::Observability);
    }

    #[test]
    fn lumping_aligned_sensors_are_not_observing() {
        let mut sys = chain3(1.0);
        sys.c = mat(&[&[2.0, 1.0, 0.0], &[0.0, 1.0, 2.0]]);
        let v = sys.observability_matrix();
        let expect = [
            [2.0, 0.0, -1.0, 1.0, 1.0, -1.0],
            [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 2.0, 1.0, -1.0, -1.0, 1.0],
        ];
        for i in 0..3 {
            for j in 0..6 {
                assert!((v[(i, j)] - expect[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
        let report = sys.is_observable(None).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.rank.rank, 2);
    }

    #[test]
    fn observability_equals_dual_controllability() {
        let mut sys = chain3(1.0);
        sys.c = mat(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]);
        let dual = sys.dual();
        // Same test matrix entry for entry, not merely the same rank.
        assert_eq!(sys.observability_matrix(), dual.controllability_matrix());
        let obs = sys.is_observable(None).unwrap();
        let ctl = dual.is_controllable(None).unwrap();
        assert_eq!(obs.rank.rank, ctl.rank.rank);
        assert_eq!(obs.verdict, ctl.verdict);
    }

    #[test]
    fn dual_is_an_involution() {
        let mut sys = chain3(0.37);
        sys.c = mat(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0]]);
        let back = sys.dual().dual();
        assert_eq!(back, sys);
    }

    #[test]
    fn verdicts_are_invariant_under_rate_scaling() {
        for k in [1e-3, 0.37, 1.0, 1e3] {
            let sys = chain3(k);
            assert!(sys.is_controllable(None).unwrap().verdict, "k = {k}");
            let mut partial = sys.clone();
            partial.b = mat(&[&[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[1.0, -1.0, 0.0]]);
            partial.b = partial.b.scale(k);
            assert_eq!(partial.is_controllable(None).unwrap().rank.rank, 2, "k = {k}");
        }
    }

    #[test]
    fn single_state_system() {
        let sys = LtiSystem::new(
            mat(&[&[-1.0]]),
            mat(&[&[2.0]]),
            mat(&[&[1.0]]),
        )
        .unwrap();
        assert!(sys.is_controllable(None).unwrap().verdict);
        assert!(sys.is_observable(None).unwrap().verdict);
    }
}
