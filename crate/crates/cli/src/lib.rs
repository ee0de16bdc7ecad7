//! Command-line front end for `qrc-core`.
//!
//! Commands read a channel-spec file ([`spec`]), run the analyses in
//! [`commands`], and write deterministic JSON/CSV artifacts ([`output`]).
//! `verify` runs the acceptance suite in [`verify`].

use thiserror::Error;

pub mod commands;
pub mod output;
pub mod spec;
pub mod verify;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{failed} of {total} checks failed")]
    CheckFailure { failed: usize, total: usize },
}

impl CliError {
    /// 1 for failed checks, 2 for invalid input or unwritable output.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailure { .. } => 1,
            CliError::InvalidInput(_) | CliError::Io(_) => 2,
        }
    }
}
