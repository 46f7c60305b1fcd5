//! Batch front end for the `muskat` solver: JSON configuration, experiment
//! drivers and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input, 2 for failures inside the solver stack.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<muskat::Error> for CliError {
    fn from(e: muskat::Error) -> Self {
        match e {
            muskat::Error::InvalidArgument(_) | muskat::Error::Domain(_) => CliError::Config(e.to_string()),
            muskat::Error::SolverFailure { .. } => CliError::Solver(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
