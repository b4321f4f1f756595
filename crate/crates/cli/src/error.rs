use std::path::Path;

use thiserror::Error;
use treespan::category::CategoryError;
use treespan::{EmbeddingError, PullbackError, PushoutError, SolveError, TreeError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn at(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        match e {
            EmbeddingError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PullbackError> for CliError {
    fn from(e: PullbackError) -> Self {
        match e {
            PullbackError::Internal(_) => CliError::Internal(e.to_string()),
            PullbackError::Embedding(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PushoutError> for CliError {
    fn from(e: PushoutError) -> Self {
        match e {
            PushoutError::InternalVerificationFailure(_) | PushoutError::InvariantViolated(_) => {
                CliError::Internal(e.to_string())
            }
            PushoutError::Embedding(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Internal(_) => CliError::Internal(e.to_string()),
            SolveError::Pushout(e) => e.into(),
            SolveError::Pullback(e) => e.into(),
            SolveError::Embedding(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CategoryError> for CliError {
    fn from(e: CategoryError) -> Self {
        CliError::Input(e.to_string())
    }
}
