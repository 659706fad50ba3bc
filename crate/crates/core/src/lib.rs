//! Solver for ultraparabolic initial-value problems with two time variables,
//!
//! ```text
//!     u_t + u_s + L u = f(u, t, s),   u(0, s) = alpha(s),   u(t, 0) = beta(t),
//! ```
//!
//! where `L` is a self-adjoint spatial operator on (0, pi) with a known
//! orthonormal eigenbasis. Expanding in that basis decouples the linear part
//! into scalar mode equations; integrating each mode along the characteristic
//! direction t + s of the transport part yields an explicit finite-difference
//! scheme on a uniform two-time lattice. Information travels along lattice
//! diagonals from an initial-data "foot" on the k = 0 or m = 0 edge, weighted
//! by the attenuation factor exp(-lambda_n (t + s) / 2).
//!
//! Nonlinear sources are handled by fixed-point sweeps: each sweep solves the
//! linear scheme with source coefficients evaluated on the previous iterate,
//! contracting with factor T * K when the source is K-Lipschitz on a horizon
//! of length T.
//!
//! Module map:
//! - [`quadrature`]: Gauss-Legendre rules on [0, pi] for all inner products.
//! - [`basis`]: the eigenbasis catalog and projection/synthesis.
//! - [`grid`]: the two-time lattice and characteristic-diagonal arithmetic.
//! - [`field`]: per-mode coefficient arrays over the lattice.
//! - [`linear`]: the explicit scheme for linear sources plus its stability bound.
//! - [`nonlinear`]: fixed-point iteration, contraction and a-priori checks.
//! - [`diagnostics`]: discrete error norms and convergence-order studies.
//! - [`catalog`]: four manufactured-solution benchmark problems with
//!   published reference errors.

pub mod basis;
pub mod catalog;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod linear;
pub mod nonlinear;
pub mod quadrature;

pub use basis::{make_basis, project, synthesize, BasisKind, EigenBasis, EigenPair};
pub use catalog::{
    all_examples, example, Example, ProblemKind, PublishedTable, RunOutput, RunParams, SliceAxis,
    SliceSpec,
};
pub use diagnostics::{
    convergence_study, discrete_norms, exact_on_grid, pairwise_order, ErrorReport, StudyRow,
};
pub use error::SolverError;
pub use field::SpectralField;
pub use grid::{characteristic_trace, roll_back_diagonal, DiagonalTrace, TimeGrid};
pub use linear::{attenuation, solve_linear, stability_bound_check, BoundCheck, LinearProblem};
pub use nonlinear::{
    a_priori_bound_check, contraction_check, picard_solve, IterationReport, NonlinearProblem,
    PicardOutcome, SourceForm,
};
pub use quadrature::{gauss_legendre_rule, integrate, QuadratureRule};

/// Shared function type for boundary data: `(x, time) -> value`.
pub type BoundaryFn = std::sync::Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Shared function type for space-time profiles: `(x, t, s) -> value`.
pub type ProfileFn = std::sync::Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Shared function type for state-dependent sources: `(u, x, t, s) -> value`.
pub type StateFn = std::sync::Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;
