//! Error type shared by the solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    /// A constructor or solver received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The initial data disagree at the corner (t, s) = (0, 0), where both
    /// conditions apply and the scheme's diagonal foot needs a single value.
    #[error(
        "incompatible initial data: max |alpha(x, 0) - beta(x, 0)| = {max_dev:.3e} \
         exceeds tolerance {tol:.3e}"
    )]
    IncompatibleData { max_dev: f64, tol: f64 },

    /// Two inputs that must share a shape (grids, sample arrays) do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}
