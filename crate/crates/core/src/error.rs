use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("degenerate spectrum: eigenvalue gap {gap:.3e} below {threshold:.1e}; thermal jump set is not unique")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("steady state is not unique: second-smallest singular value {second:.3e} below {threshold:.1e}")]
    NonuniqueSteadyState { second: f64, threshold: f64 },

    #[error("correlation amplitude c = {c} outside positivity range [{min}, {max}]")]
    CorrelationOutOfRange { c: f64, min: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
