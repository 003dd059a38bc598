use std::path::Path;

use netcomm_core::community::CommunityError;
use thiserror::Error;

/// Failures surfaced to the shell. The variant decides the exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag combination or value.
    #[error("{0}")]
    Usage(String),
    /// Unreadable, malformed or inconsistent input files.
    #[error("{0}")]
    Input(String),
    /// The algorithm cannot run on this input.
    #[error("{0}")]
    Precondition(String),
    /// `replay --verify` produced different bytes.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Mismatch(_) => 1,
        }
    }

    pub fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<CommunityError> for CliError {
    fn from(e: CommunityError) -> Self {
        match e {
            CommunityError::InvalidParameter(_) | CommunityError::UnknownAlgorithm(_) => CliError::Usage(e.to_string()),
            CommunityError::PartitionSize { .. } => CliError::Input(e.to_string()),
            CommunityError::NoEdges | CommunityError::Disconnected { .. } | CommunityError::NoConvergence { .. } => {
                CliError::Precondition(e.to_string())
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
