//! CLI error type with the exit-code contract.
//!
//! Exit 0: success. Exit 1: input data failed to load or validate, or a
//! computation's preconditions were violated. Exit 2: the invocation
//! itself was invalid (unknown flags and subcommands are caught by the
//! argument parser; unresolvable inputs and malformed `--config` files
//! are raised here).

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// The invocation is incomplete or contradictory (exit 2).
    #[error("{0}")]
    Usage(String),

    /// Input data or a downstream computation failed (exit 1).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl From<modaudit_core::Error> for CliError {
    fn from(e: modaudit_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("json error: {e}"))
    }
}
