//! Configuration-driven experiment runner for the Schwarz solver studies.
//!
//! A run builds the configured problem, sweeps over partition shapes and
//! preconditioners, and writes a report CSV together with residual histories,
//! eigenvalue reports, exchange ledgers and VTK files for every row.

mod config;
mod report;
mod run;
mod synthetic;

pub use config::{parse_shape, Preconditioner, ProblemKind, RunConfig, SolverKind};
pub use report::{ReportRow, StudyReport};
pub use run::{build_problem, run};
pub use synthetic::{generate_synthetic_contrast, Pattern};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    NotConverged(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    /// 0 success, 1 configuration or I/O error, 2 non-convergence,
    /// 3 numerical contract violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 1,
            RunError::NotConverged(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }

    pub(crate) fn message(&self) -> String {
        match self {
            RunError::Config(m) | RunError::NotConverged(m) | RunError::Numerical(m) => m.clone(),
            other => other.to_string(),
        }
    }

    /// Classifies a library error raised while doing `context`.
    pub fn from_core(context: &str, e: geneo::Error) -> Self {
        use geneo::Error as E;
        let msg = format!("{context}: {e}");
        match e {
            E::InvalidInput(_) | E::Parse { .. } => RunError::Config(msg),
            E::Io(source) => RunError::Io {
                context: context.to_string(),
                source,
            },
            E::NotConverged { .. } => RunError::NotConverged(msg),
            E::DegenerateJacobian { .. }
            | E::NotPositiveDefinite { .. }
            | E::ContractViolation(_)
            | E::Breakdown(_) => RunError::Numerical(msg),
        }
    }
}
