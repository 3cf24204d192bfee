use thiserror::Error;

/// Errors raised by the grid, assembly, decomposition and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate geometry: cell {cell} has Jacobian determinant {det:e} at a quadrature point")]
    DegenerateJacobian { cell: usize, det: f64 },

    #[error("matrix is not positive definite: pivot {pivot:e} at column {column} (max pivot {max_pivot:e})")]
    NotPositiveDefinite { column: usize, pivot: f64, max_pivot: f64 },

    #[error("operator contract violated: {0}")]
    ContractViolation(String),

    #[error("{solver} did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("breakdown in {0}")]
    Breakdown(String),

    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            message: message.into(),
        }
    }
}
