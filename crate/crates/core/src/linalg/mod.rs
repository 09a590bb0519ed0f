//! Dense linear algebra support: matrix storage, numerical rank, the right
//! generalized inverse, and symmetric eigendecomposition.

mod eigen;
mod matrix;
mod svd;

pub use eigen::{spectral_radius_symmetric, symmetric_eigen, SymmetricEigen};
pub use matrix::{Matrix, RankResult};

pub(crate) use matrix::cholesky_solve;
