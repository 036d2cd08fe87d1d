//! Command-line front end for `qcm-core`: argument and config-file handling,
//! the analysis commands, the randomized check suites, and CSV/JSON output.

pub mod check;
pub mod cli;
pub mod commands;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Physics(#[from] qcm_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// `2` for configuration problems, `1` for everything that went wrong
    /// after a valid configuration was accepted.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Physics(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}
