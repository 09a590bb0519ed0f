//! Classification of state matrices through the splitting A = -s(I - T).
//!
//! With s taken as the largest diagonal magnitude, T = I + A/s collects the
//! normalized interaction structure. When T is nonnegative, symmetric, and
//! irreducible, A is classified by the spectral radius of T: a singular
//! M-matrix at rho = 1 (the compartmental, mass-conserving case) and a
//! nonsingular one at rho < 1. Any failed prerequisite or rho > 1 yields
//! `NotApplicable`; that is a verdict, not an error.

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius_symmetric, Matrix};

/// Relative threshold under which T entries count as zero (nonnegativity
/// and graph edges) and asymmetry counts as symmetric.
const STRUCTURE_REL_TOL: f64 = 1e-12;
/// Half-width of the singular band around rho = 1.
const RHO_TOL: f64 = 1e-9;
/// Convergence tolerance of the power iteration used for non-symmetric T.
const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;

/// Verdict of [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    NonsingularMMatrix,
    SingularMMatrix,
    NotApplicable,
}

/// Evidence produced by [`classify`]: the splitting, the three structural
/// prerequisites, and the spectral radius of T.
#[derive(Debug, Clone, PartialEq)]
pub struct MMatrixReport {
    pub s: f64,
    pub t: Matrix,
    pub t_nonnegative: bool,
    pub t_symmetric: bool,
    pub t_irreducible: bool,
    pub rho: f64,
    pub classification: Classification,
}

/// Canonical splitting A = -s(I - T) with s the largest diagonal magnitude.
///
/// Fails with [`Error::ZeroDiagonal`] when every diagonal entry is zero, in
/// which case no scale is defined.
pub fn decompose(a: &Matrix) -> Result<(f64, Matrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let s = (0..a.rows()).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    if s == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    Ok((s, splitting(a, s)))
}

/// Splitting with a caller-chosen positive scale: T = I + A/s.
pub fn decompose_with_s(a: &Matrix, s: f64) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::NonPositive { name: "s", value: s });
    }
    Ok(splitting(a, s))
}

fn splitting(a: &Matrix, s: f64) -> Matrix {
    Matrix::identity(a.rows()).add(&a.scale(1.0 / s))
}

/// Classifies A through the splitting, using `s_override` instead of the
/// canonical scale when given.
pub fn classify(a: &Matrix, s_override: Option<f64>) -> Result<MMatrixReport> {
    let (s, t) = match s_override {
        Some(s) => (s, decompose_with_s(a, s)?),
        None => decompose(a)?,
    };
    let scale = t.norm_inf();
    let tol = STRUCTURE_REL_TOL * scale;

    let t_nonnegative = t.data().iter().all(|&x| x >= -tol);
    let t_symmetric = t.asymmetry() <= tol;
    let t_irreducible = strongly_connected(&t, tol);

    let rho = if t_symmetric {
        spectral_radius_symmetric(&t)?
    } else {
        power_iteration_radius(&t)?
    };

    let classification = if t_nonnegative && t_symmetric && t_irreducible {
        if (rho - 1.0).abs() <= RHO_TOL {
            Classification::SingularMMatrix
        } else if rho < 1.0 - RHO_TOL {
            Classification::NonsingularMMatrix
        } else {
            Classification::NotApplicable
        }
    } else {
        Classification::NotApplicable
    };

    Ok(MMatrixReport {
        s,
        t,
        t_nonnegative,
        t_symmetric,
        t_irreducible,
        rho,
        classification,
    })
}

/// Tests whether A generates a mass-conserving flow: nonnegative
/// off-diagonal entries and column sums of at most roundoff size. Returns
/// false for non-square input.
pub fn is_compartmental(a: &Matrix) -> bool {
    if !a.is_square() {
        return false;
    }
    let tol = STRUCTURE_REL_TOL * a.norm_inf();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j && a[(i, j)] < -tol {
                return false;
            }
        }
    }
    (0..a.cols()).all(|j| (0..a.rows()).map(|i| a[(i, j)]).sum::<f64>() <= tol)
}

/// Strong connectivity of the directed graph with an edge i -> j whenever
/// |t[i][j]| exceeds the threshold. A 1 x 1 matrix counts as irreducible.
fn strongly_connected(t: &Matrix, tol: f64) -> bool {
    let n = t.rows();
    if n == 1 {
        return true;
    }
    let reach = |transposed: bool| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![0_usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if transposed { t[(j, i)] } else { t[(i, j)] };
                if !seen[j] && w.abs() > tol {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    };
    reach(false) && reach(true)
}

/// Spectral radius of |T| by power iteration on the shifted matrix |T| + I,
/// which keeps the dominant eigenvalue simple for nonnegative structure.
fn power_iteration_radius(t: &Matrix) -> Result<f64> {
    let n = t.rows();
    let abs_t = Matrix::new(
        n,
        n,
        t.data().iter().map(|x| x.abs()).collect(),
    )
    .expect("entries of a valid matrix stay finite");
    let mut v = vec![1.0; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let mut w = abs_t.matvec(&v);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += vi;
        }
        let norm = w.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if norm == 0.0 {
            return Ok(0.0);
        }
        for x in &mut w {
            *x /= norm;
        }
        let next = norm - 1.0;
        let done = (next - lambda).abs() <= POWER_TOL * next.abs().max(1.0);
        lambda = next;
        v = w;
        if done {
            return Ok(lambda.max(0.0));
        }
    }
    Err(Error::ConvergenceFailed("power iteration"))
}
