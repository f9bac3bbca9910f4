//! Library side of the `orlicz-spectral` command-line tool.

pub mod commands;
pub mod config;
pub mod report;
pub mod sweep;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("bound violation: {0}")]
    Violation(String),
}

impl CliError {
    /// Process exit code: 2 configuration, 3 solver, 4 bound violation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Violation(_) => 4,
        }
    }
}
