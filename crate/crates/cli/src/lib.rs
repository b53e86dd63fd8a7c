//! Experiment runner behind the `otoc` binary: configuration loading, exact
//! and sampled protocol runs, dressing scans and CSV output.

pub mod config;
pub mod csv;
pub mod run;
pub mod verify;

use std::process::ExitCode;

use thiserror::Error;

/// Largest tolerated gap between a protocol reconstruction and the direct
/// correlator before a run is reported as an invariant violation.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Sim(#[from] otoc_sim::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Sim(_) | CliError::Io(_) => 1,
        })
    }
}
