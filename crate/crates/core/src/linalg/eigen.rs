//! Eigendecomposition of symmetric matrices by cyclic Jacobi rotations.
//!
//! Only symmetric input is supported; the routine checks symmetry up to a
//! scale-relative tolerance and reads the upper triangle. Rotations are
//! applied until the off-diagonal sum underflows to exactly zero, which for
//! well-scaled symmetric matrices happens within a handful of sweeps.

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;

const MAX_SWEEPS: usize = 50;
const SYMMETRY_REL_TOL: f64 = 1e-12;

/// Result of a symmetric eigendecomposition: `values` ascending, and the
/// matching orthonormal eigenvectors as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Fails with [`Error::NotSymmetric`] when the asymmetry exceeds
/// `1e-12 * ||m||_inf`, and with [`Error::NotSquare`] for rectangular input.
pub fn symmetric_eigen(m: &Matrix) -> Result<SymmetricEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let asymmetry = m.asymmetry();
    if asymmetry > SYMMETRY_REL_TOL * m.norm_inf() {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let mut b: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut d = b.clone();
    let mut z = vec![0.0; n];

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let mut sm = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                sm += a[(p, q)].abs();
            }
        }
        if sm == 0.0 {
            converged = true;
            break;
        }
        let tresh = if sweep < 3 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let g = 100.0 * a[(p, q)].abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[(p, q)] = 0.0;
                } else if a[(p, q)].abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[(p, q)] / h
                    } else {
                        let theta = 0.5 * h / a[(p, q)];
                        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            -t
                        } else {
                            t
                        }
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[(p, q)];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[(p, q)] = 0.0;
                    for j in 0..p {
                        rotate(&mut a, s, tau, j, p, j, q);
                    }
                    for j in p + 1..q {
                        rotate(&mut a, s, tau, p, j, j, q);
                    }
                    for j in q + 1..n {
                        rotate(&mut a, s, tau, p, j, q, j);
                    }
                    for j in 0..n {
                        rotate(&mut v, s, tau, j, p, j, q);
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailed("Jacobi eigenvalue iteration"));
    }

    // Sort eigenvalues ascending and permute eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn rotate(m: &mut Matrix, s: f64, tau: f64, i: usize, j: usize, k: usize, l: usize) {
    let g = m[(i, j)];
    let h = m[(k, l)];
    m[(i, j)] = g - s * (h + g * tau);
    m[(k, l)] = h + s * (g - h * tau);
}

/// Spectral radius (largest eigenvalue magnitude) of a symmetric matrix.
pub fn spectral_radius_symmetric(m: &Matrix) -> Result<f64> {
    let eig = symmetric_eigen(m)?;
    let lo = eig.values.first().copied().unwrap_or(0.0);
    let hi = eig.values.last().copied().unwrap_or(0.0);
    Ok(lo.abs().max(hi.abs()))
}
