//! Library surface of the `repetext` command-line tool: the run
//! configuration, the subcommand implementations, and their error type.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod commands;
pub mod config;

pub use commands::{cmd_all, cmd_entities, cmd_graph, cmd_repeats, cmd_sequences, cmd_stats};
pub use config::RunConfig;

/// Exit code 1 for usage/config errors, 2 for input/format errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}
