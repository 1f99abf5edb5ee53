//! Command-line experiments for stochastic contact variational integrators.
//!
//! Each command resolves an [`ExperimentConfig`], writes its CSV tables, a
//! JSON summary and gnuplot scripts into the output directory, and finishes
//! with a `manifest.json` listing every emitted file with its SHA-256.

pub mod commands;
pub mod config;
mod output;
mod plots;

use std::fmt;
use std::io;

pub use commands::{cmd_converge, cmd_criticality, cmd_diagnose, cmd_simulate};
pub use config::{ConfigFile, ExperimentConfig, Scheme};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Integration(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Integration(m) => write!(f, "integration error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}
