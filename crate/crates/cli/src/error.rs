use fairopt::solver::CcgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    /// 0 success, 1 parse or configuration, 2 infeasible, 3 non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::NonConvergence(_) => 3,
            _ => 1,
        }
    }
}

impl From<CcgError> for CliError {
    fn from(e: CcgError) -> Self {
        match e {
            CcgError::MasterInfeasible => CliError::Infeasible(e.to_string()),
            CcgError::NonConvergence { .. } | CcgError::MasterStatus(_) => CliError::NonConvergence(e.to_string()),
            CcgError::InvalidTolerance(_) | CcgError::ModeMismatch | CcgError::DualSet(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}
