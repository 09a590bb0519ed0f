//! Exact linear lumping of state-space systems.
//!
//! A full-row-rank matrix M (l x n, l <= n) aggregates the state as
//! x_hat = M x. The reduction is *exact* when an l x l matrix A_hat with
//! A_hat M = M A exists, which holds iff the row space of M is invariant
//! under A^T; A_hat is then M A M^+ with the right generalized inverse
//! M^+ = M^T (M M^T)^-1. Exactness is decided numerically through the
//! relative residual of A_hat M - M A.
//!
//! For symmetric A, row spaces spanned by eigenvectors are invariant, so
//! mixing selected eigenvectors with any nonsingular matrix N yields an
//! exact lumping matrix M = N F. Controllability survives exact lumping
//! (the converse fails); observability of a lumped system is analyzed
//! through the dual construction rather than an invented observation map.

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::lti::{AnalysisReport, LtiSystem};

/// Default residual tolerance below which a lumping counts as exact.
pub const DEFAULT_EXACTNESS_TOL: f64 = 1e-9;

/// Entries of a normalized eigenvector at most this far from zero are
/// ignored when fixing the sign of the leading entry.
const LEADING_ENTRY_TOL: f64 = 1e-9;

/// An exact lumping x_hat = M x together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpingScheme {
    /// Lumping matrix, l x n with full row rank.
    pub m: Matrix,
    /// Lumped state matrix A_hat = M A M^+.
    pub a_hat: Matrix,
    /// Right generalized inverse M^+ = M^T (M M^T)^-1.
    pub m_pinv: Matrix,
    /// Relative residual of A_hat M - M A at construction.
    pub residual: f64,
    /// Exactness tolerance the residual was checked against.
    pub tolerance: f64,
}

/// A lumped system plus the dual-side data used for observability analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpedSystem {
    /// Forward lumped system (A_hat, M B, C M^T).
    pub system: LtiSystem,
    /// State matrix M A^T M^+ of the lumped dual system.
    pub a_tilde: Matrix,
    /// Input matrix M C^T of the lumped dual system.
    pub dual_input: Matrix,
    /// Relative residual of a_tilde M - M A^T; small only when the row
    /// space of M is also invariant under A.
    pub dual_residual: f64,
}

/// Witness for the kinetic-lumping test: nonnegative M where every row owns
/// a column in which it holds the only nonzero entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KineticWitness {
    /// Kinetic; `pivot_columns[i]` is a column owned solely by row `i`.
    Kinetic { pivot_columns: Vec<usize> },
    /// A negative entry disqualifies M.
    NegativeEntry { row: usize, col: usize },
    /// Row `row` has no column to itself.
    MissingPivot { row: usize },
}

impl KineticWitness {
    pub fn is_kinetic(&self) -> bool {
        matches!(self, KineticWitness::Kinetic { .. })
    }
}

/// Controllability of a system before and after lumping.
#[derive(Debug, Clone, PartialEq)]
pub struct PreservationReport {
    pub original_controllable: bool,
    pub lumped_controllable: bool,
    /// False only in the impossible case of a controllable original with an
    /// uncontrollable exact lumping.
    pub theorem_consistent: bool,
    pub original: AnalysisReport,
    pub lumped: AnalysisReport,
}

fn check_lumping_dims(a: &Matrix, m: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if m.cols() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "lumping matrix",
            expected: format!("{} columns", a.rows()),
            got: format!("{} columns", m.cols()),
        });
    }
    Ok(())
}

fn lumped_a_with_pinv(a: &Matrix, m: &Matrix, m_pinv: &Matrix) -> (Matrix, f64) {
    let ma = m.matmul(a);
    let a_hat = ma.matmul(m_pinv);
    let residual = a_hat.matmul(m).sub(&ma).norm_inf() / (1.0 + ma.norm_inf());
    (a_hat, residual)
}

/// Best lumped state matrix `M A M^+` and the relative residual
/// `||A_hat M - M A||_inf / (1 + ||M A||_inf)` measuring how far M is from
/// an exact lumping of A.
pub fn lumped_a(a: &Matrix, m: &Matrix) -> Result<(Matrix, f64)> {
    check_lumping_dims(a, m)?;
    let m_pinv = m.right_pseudo_inverse()?;
    Ok(lumped_a_with_pinv(a, m, &m_pinv))
}

/// Builds a [`LumpingScheme`], accepting M only when the lumping residual is
/// at or below `exact_tol` (default [`DEFAULT_EXACTNESS_TOL`]).
pub fn make_scheme(a: &Matrix, m: Matrix, exact_tol: Option<f64>) -> Result<LumpingScheme> {
    let tolerance = exact_tol.unwrap_or(DEFAULT_EXACTNESS_TOL);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::NonPositive {
            name: "exactness tolerance",
            value: tolerance,
        });
    }
    check_lumping_dims(a, &m)?;
    let m_pinv = m.right_pseudo_inverse()?;
    let (a_hat, residual) = lumped_a_with_pinv(a, &m, &m_pinv);
    if residual > tolerance {
        return Err(Error::NotLumpable {
            residual,
            tolerance,
        });
    }
    Ok(LumpingScheme {
        m,
        a_hat,
        m_pinv,
        residual,
        tolerance,
    })
}

/// Assembles a lumping matrix M = N F from selected eigenvectors of a
/// symmetric matrix.
///
/// `selection` indexes the eigenvector list of `a` ordered by ascending
/// eigenvalue. Each selected vector becomes a row of F after a fixed
/// normalization: rescaled so its largest-magnitude entry is +-1, then
/// negated if needed so the first entry of visible size is positive. The
/// rows are mixed by the nonsingular matrix `n_mix`.
///
/// The row space of the result is spanned by eigenvectors, hence invariant,
/// so the returned M always passes [`make_scheme`] at the default tolerance.
pub fn build_m_from_eigenvectors(
    a: &Matrix,
    selection: &[usize],
    n_mix: &Matrix,
) -> Result<Matrix> {
    let eig = symmetric_eigen(a)?;
    let n = a.rows();
    if selection.is_empty() {
        return Err(Error::InvalidSelection("no indices given".into()));
    }
    if selection.len() > n {
        return Err(Error::InvalidSelection(format!(
            "{} indices for a {n}-state system",
            selection.len()
        )));
    }
    for (pos, &idx) in selection.iter().enumerate() {
        if idx >= n {
            return Err(Error::InvalidSelection(format!(
                "index {idx} out of range for {n} eigenvectors"
            )));
        }
        if selection[..pos].contains(&idx) {
            return Err(Error::InvalidSelection(format!("index {idx} repeated")));
        }
    }
    let l = selection.len();
    if n_mix.rows() != l || n_mix.cols() != l {
        return Err(Error::DimensionMismatch {
            op: "mixing matrix",
            expected: format!("{l}x{l}"),
            got: format!("{}x{}", n_mix.rows(), n_mix.cols()),
        });
    }
    let mix_rank = n_mix.rank(None)?;
    if mix_rank.rank < l {
        return Err(Error::SingularMix {
            rank: mix_rank.rank,
            order: l,
        });
    }

    let mut f = Matrix::zeros(l, n);
    for (row, &idx) in selection.iter().enumerate() {
        let mut v = eig.vectors.col(idx);
        let max_abs = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        for x in &mut v {
            *x /= max_abs;
        }
        if let Some(&lead) = v.iter().find(|x| x.abs() > LEADING_ENTRY_TOL) {
            if lead < 0.0 {
                for x in &mut v {
                    *x = -*x;
                }
            }
        }
        for (col, &x) in v.iter().enumerate() {
            f[(row, col)] = x;
        }
    }
    Ok(n_mix.matmul(&f))
}

/// Applies a scheme to a full system.
///
/// The forward lumped system is (A_hat, M B, C M^T); its observation matrix
/// is the transposed dual-lumped input, since no independent observation map
/// is defined for the aggregated state. The dual-side pair (a_tilde, M C^T)
/// with its own residual is stored for observability analysis.
pub fn lump_system(sys: &LtiSystem, scheme: &LumpingScheme) -> Result<LumpedSystem> {
    if scheme.m.cols() != sys.state_dim() {
        return Err(Error::DimensionMismatch {
            op: "lumping scheme",
            expected: format!("{} columns", sys.state_dim()),
            got: format!("{} columns", scheme.m.cols()),
        });
    }
    let b_hat = scheme.m.matmul(&sys.b);
    let c_hat = sys.c.matmul(&scheme.m.transpose());
    let system = LtiSystem::new(scheme.a_hat.clone(), b_hat, c_hat)?;
    let (a_tilde, dual_residual) =
        lumped_a_with_pinv(&sys.a.transpose(), &scheme.m, &scheme.m_pinv);
    let dual_input = scheme.m.matmul(&sys.c.transpose());
    Ok(LumpedSystem {
        system,
        a_tilde,
        dual_input,
        dual_residual,
    })
}

/// Lumps the dual system: (M A^T M^+, M C^T, (M B)^T).
///
/// Controllability of this system is how observability of the lumped state
/// is judged. Fails when the row space of M is not invariant under A (the
/// dual-side residual exceeds the scheme tolerance).
pub fn dual_lumped(sys: &LtiSystem, scheme: &LumpingScheme) -> Result<LtiSystem> {
    let lumped = lump_system(sys, scheme)?;
    if lumped.dual_residual > scheme.tolerance {
        return Err(Error::NotLumpable {
            residual: lumped.dual_residual,
            tolerance: scheme.tolerance,
        });
    }
    LtiSystem::new(
        lumped.a_tilde,
        lumped.dual_input,
        lumped.system.b.transpose(),
    )
}

/// Tests whether M is a kinetic lumping: all entries nonnegative and every
/// row the sole owner of some column. Entries within `1e-12 * max|M|` of
/// zero are treated as zero.
pub fn is_kinetic_lumping(m: &Matrix) -> KineticWitness {
    let tol = 1e-12 * m.max_abs();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)] < -tol {
                return KineticWitness::NegativeEntry { row: i, col: j };
            }
        }
    }
    let mut pivot_columns = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let pivot = (0..m.cols()).find(|&j| {
            m[(i, j)] > tol && (0..m.rows()).all(|other| other == i || m[(other, j)].abs() <= tol)
        });
        match pivot {
            Some(j) => pivot_columns.push(j),
            None => return KineticWitness::MissingPivot { row: i },
        }
    }
    KineticWitness::Kinetic { pivot_columns }
}

/// Runs the Kalman test on the original and on the lumped system and checks
/// the preservation property: an exactly lumped controllable system stays
/// controllable. (An uncontrollable original may still lump to a
/// controllable reduced system.)
pub fn verify_preservation(sys: &LtiSystem, scheme: &LumpingScheme) -> Result<PreservationReport> {
    verify_preservation_with(sys, scheme, None)
}

/// [`verify_preservation`] with an explicit relative rank tolerance for both
/// tests.
pub fn verify_preservation_with(
    sys: &LtiSystem,
    scheme: &LumpingScheme,
    rel_tol: Option<f64>,
) -> Result<PreservationReport> {
    let lumped = lump_system(sys, scheme)?;
    let original = sys.is_controllable(rel_tol)?;
    let reduced = lumped.system.is_controllable(rel_tol)?;
    Ok(PreservationReport {
        original_controllable: original.verdict,
        lumped_controllable: reduced.verdict,
        theorem_consistent: !(original.verdict && !reduced.verdict),
        original,
        lumped: reduced,
    })
}
