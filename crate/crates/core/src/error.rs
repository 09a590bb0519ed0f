//! Crate-wide error type.

use std::fmt;

use crate::lti::AnalysisReport;

/// Errors reported by construction, analysis, and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix construction rejected: zero dimension or wrong data length.
    InvalidShape(String),
    /// A non-finite entry (NaN or infinity) was supplied.
    NonFinite { row: usize, col: usize },
    /// Operand shapes are incompatible with the requested operation.
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Relative rank tolerance must lie strictly between 0 and 1.
    InvalidTolerance(f64),
    /// The matrix does not have the rank the operation requires.
    RankDeficient { rank: usize, required: usize },
    /// A symmetric matrix was required; carries the measured asymmetry.
    NotSymmetric { asymmetry: f64 },
    /// A symmetric positive definite matrix was required; the Cholesky
    /// factorization hit a non-positive pivot.
    NotPositiveDefinite { pivot: usize },
    /// An iterative scheme failed to converge.
    ConvergenceFailed(&'static str),
    /// M·A does not stay in the row space of M within the tolerance.
    NotLumpable { residual: f64, tolerance: f64 },
    /// The eigenvector mixing matrix must be nonsingular.
    SingularMix { rank: usize, order: usize },
    /// Eigenvector selection indices are empty, repeated, or out of range.
    InvalidSelection(String),
    /// The splitting A = -s(I - T) is undefined: every diagonal entry is zero.
    ZeroDiagonal,
    /// A strictly positive scalar argument was required.
    NonPositive { name: &'static str, value: f64 },
    /// Chain length outside the supported family.
    UnsupportedChainLength(usize),
    /// A reaction may not have identical source and target species.
    SelfLoop { index: usize },
    /// A reaction references a species index outside the species list.
    UnknownSpecies { index: usize, count: usize },
    /// Steering requires a completely controllable system.
    NotControllable(Box<AnalysisReport>),
    /// The controllability Gramian is too ill-conditioned to invert.
    IllConditioned { condition: f64 },
    /// A control signal is malformed or has the wrong width.
    InvalidControl(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidShape(msg) => write!(f, "invalid matrix shape: {msg}"),
            Error::NonFinite { row, col } => {
                write!(f, "non-finite entry at ({row}, {col})")
            }
            Error::DimensionMismatch { op, expected, got } => {
                write!(f, "{op}: expected {expected}, got {got}")
            }
            Error::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
            Error::InvalidTolerance(t) => {
                write!(f, "relative tolerance must lie in (0, 1), got {t}")
            }
            Error::RankDeficient { rank, required } => {
                write!(f, "matrix has rank {rank}, but rank {required} is required")
            }
            Error::NotSymmetric { asymmetry } => {
                write!(f, "symmetric matrix required (asymmetry {asymmetry:.3e})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::ConvergenceFailed(what) => write!(f, "{what} did not converge"),
            Error::NotLumpable { residual, tolerance } => write!(
                f,
                "matrix is not exactly lumpable by M: residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
            ),
            Error::SingularMix { rank, order } => {
                write!(f, "mixing matrix is singular (rank {rank} of {order})")
            }
            Error::InvalidSelection(msg) => write!(f, "invalid eigenvector selection: {msg}"),
            Error::ZeroDiagonal => {
                write!(f, "splitting undefined: every diagonal entry is zero")
            }
            Error::NonPositive { name, value } => {
                write!(f, "{name} must be positive, got {value}")
            }
            Error::UnsupportedChainLength(n) => write!(
                f,
                "no standard two-row lumping for chain length {n} (supported: 3 and even lengths)"
            ),
            Error::SelfLoop { index } => {
                write!(f, "reaction {index} has identical source and target")
            }
            Error::UnknownSpecies { index, count } => {
                write!(f, "species index {index} out of range (have {count})")
            }
            Error::NotControllable(report) => write!(
                f,
                "system is not completely controllable (rank {}/{})",
                report.rank.rank, report.state_dim
            ),
            Error::IllConditioned { condition } => write!(
                f,
                "controllability Gramian is ill-conditioned (condition {condition:.3e})"
            ),
            Error::InvalidControl(msg) => write!(f, "invalid control signal: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
