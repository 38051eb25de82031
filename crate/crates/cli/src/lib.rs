//! Experiment driver for rotatable-antenna mixed-field downlinks: TOML
//! configuration, analysis and sweep recipes, and CSV output.

pub mod analyze;
pub mod app;
pub mod config;
pub mod experiments;
pub mod output;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
