//! Exact linear lumping and controllability analysis for LTI systems.
//!
//! The crate works with state-space models x' = Ax + Bu, y = Cx and answers
//! three connected questions:
//!
//! * **Reachability.** Kalman rank tests for complete controllability and
//!   complete observability ([`LtiSystem::is_controllable`],
//!   [`LtiSystem::is_observable`]), with observability handled through the
//!   dual system so both sides share one code path.
//! * **Reduction.** Exact linear lumping x_hat = Mx by a full-row-rank
//!   matrix M ([`lumping::make_scheme`]). A lumping is accepted only when
//!   the reduced matrix A_hat = M A M^+ reproduces the projected dynamics
//!   to within a relative residual, and the library checks how reduction
//!   interacts with controllability ([`lumping::verify_preservation`]): an
//!   exact lumping of a completely controllable system is again completely
//!   controllable, while the converse direction can fail and is reported
//!   rather than assumed.
//! * **Structure.** Classification of state matrices as singular or
//!   nonsingular M-matrices through the splitting A = -s(I - T)
//!   ([`mmatrix::classify`]), and generators for the compartmental reaction
//!   chains where these notions meet ([`compartmental`]).
//!
//! A small fixed-step simulator and a Gramian-based minimum-energy steering
//! routine ([`sim`]) make the verdicts testable in the time domain: exact
//! lumpings track the projected trajectory for every input, and
//! controllable systems can actually be driven between states.
//!
//! ```
//! use lumpsys::{make_scheme, standard_two_row_m, ChainSpec};
//!
//! let sys = lumpsys::gen_chain(&ChainSpec::new(3, 1.0).unwrap());
//! let scheme = make_scheme(&sys.a, standard_two_row_m(3).unwrap(), None).unwrap();
//! let report = lumpsys::lump_system(&sys, &scheme).unwrap();
//! assert!(report.system.is_controllable(None).unwrap().verdict);
//! ```

pub mod compartmental;
mod error;
mod linalg;
pub mod lti;
pub mod lumping;
pub mod mmatrix;
pub mod sim;

pub use compartmental::{gen_chain, standard_two_row_m, ChainSpec, Reaction, ReactionNetwork};
pub use error::{Error, Result};
pub use linalg::{symmetric_eigen, Matrix, RankResult, SymmetricEigen};
pub use lti::{AnalysisKind, AnalysisReport, LtiSystem};
pub use lumping::{
    lump_system, make_scheme, LumpedSystem, LumpingScheme, PreservationReport,
};
pub use mmatrix::{classify, Classification, MMatrixReport};
pub use sim::{simulate, steer, ControlSignal, Trajectory};
