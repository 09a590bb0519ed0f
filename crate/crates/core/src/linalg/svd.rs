//! Singular values via one-sided Jacobi orthogonalization.
//!
//! The matrix is worked on in its tall orientation (singular values are
//! invariant under transposition). Plane rotations are applied to column
//! pairs until all pairs are numerically orthogonal; the column norms are
//! then the singular values. For the small dense matrices handled here this
//! is simple, robust, and accurate to high relative precision.

// Rotations write both columns of a pair; index loops beat split_at_mut here.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;

const MAX_SWEEPS: usize = 64;

/// Singular values of `m` in descending order (`min(rows, cols)` values).
pub(crate) fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.transpose()
    };
    let (rows, cols) = (work.rows(), work.cols());
    // Column-major copy so rotations touch contiguous memory.
    let mut col: Vec<Vec<f64>> = (0..cols).map(|j| work.col(j)).collect();

    // Dot products of near-orthogonal columns carry roundoff of order
    // rows * eps * |u||v|; the rotation cutoff has to sit above that or the
    // sweep never settles.
    let ortho_tol = 10.0 * rows as f64 * f64::EPSILON;
    // A column that rank deficiency has cancelled down to rounding dust
    // points in an arbitrary direction, so it would keep triggering
    // rotations forever. Anything below this floor is left alone; the
    // Frobenius norm is rotation-invariant, so the floor is stable.
    let fro = work.data().iter().map(|x| x * x).sum::<f64>().sqrt();
    let noise_floor_sq = (ortho_tol * fro).powi(2);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let mut a = 0.0;
                let mut b = 0.0;
                let mut g = 0.0;
                for k in 0..rows {
                    a += col[i][k] * col[i][k];
                    b += col[j][k] * col[j][k];
                    g += col[i][k] * col[j][k];
                }
                if a.min(b) <= noise_floor_sq || g.abs() <= ortho_tol * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let ci = col[i][k];
                    let cj = col[j][k];
                    col[i][k] = c * ci - s * cj;
                    col[j][k] = s * ci + c * cj;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailed("one-sided Jacobi SVD"));
    }

    // Columns at the floor hold nothing but the roundoff the rotations
    // deposited; report them as exact zeros rather than as tiny singular
    // values a caller's cutoff would have to outguess.
    let mut sigma: Vec<f64> = col
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>())
        .map(|sq| if sq <= noise_floor_sq { 0.0 } else { sq.sqrt() })
        .collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(sigma)
}
