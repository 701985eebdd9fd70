use thiserror::Error;

/// Failure classes with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or data. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// An iterative computation did not converge. Exit code 3.
    #[error("{0}")]
    NonConvergence(String),
    /// Anything else. Exit code 1.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<casimir_core::Error> for CliError {
    fn from(e: casimir_core::Error) -> Self {
        use casimir_core::Error as E;
        let message = e.to_string();
        match &e {
            E::Quadrature { .. } | E::MatsubaraNotConverged { .. } => CliError::NonConvergence(message),
            E::AtSeparation { message: inner, .. }
                if inner.contains("not converged") || inner.contains("quadrature") =>
            {
                CliError::NonConvergence(message)
            }
            _ => CliError::Input(message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
