use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigensolver did not converge for a {rows}x{cols} matrix")]
    NoConvergence { rows: usize, cols: usize },

    #[error("singular {size}x{size} matrix (|det| = {det:e} below {threshold:e})")]
    Singular {
        size: usize,
        det: f64,
        threshold: f64,
    },

    #[error("ambiguous level grouping at tolerance {tol:e}; consecutive gaps: {gaps:?}")]
    AmbiguousGrouping { tol: f64, gaps: Vec<f64> },

    #[error("no zero-eigenvalue level in the watch spectrum")]
    MissingZeroLevel,

    #[error("watch Hamiltonian does not annihilate the initial state (|H_w psi0| = {residual:e})")]
    NotAnnihilated { residual: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("delta0 = {delta0} is outside the fitted regime (0, {limit})")]
    OutOfValidity { delta0: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }

    /// Process exit code: 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::Singular { .. }
            | Error::AmbiguousGrouping { .. } => 2,
            Error::Io(_) => 3,
            _ => 1,
        }
    }
}
