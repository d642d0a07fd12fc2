//! Experiment driver behind the `zerosum` binary: TOML configs in, CSV and
//! JSON data files out.

pub mod commands;
pub mod config;
pub mod experiments;
mod output;

use std::process::ExitCode;

pub use config::{Experiment, ExperimentConfig, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Assertion(String),
    #[error("root finder did not converge: {0}")]
    NonConvergence(String),
    #[error(transparent)]
    Core(#[from] zerosum::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 pass, 1 failed check, 2 bad configuration, 3 non-convergence.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Assertion(_) => 1,
            Self::Config(_) => 2,
            Self::NonConvergence(_) => 3,
            Self::Core(zerosum::Error::DidNotConverge { .. }) => 3,
            Self::Core(zerosum::Error::InvalidMeasure(_) | zerosum::Error::InvalidArgument(_)) => 2,
            Self::Core(_) | Self::Io(_) => 1,
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Version strings recorded in every manifest.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Versions {
    pub zerosum: &'static str,
    pub zerosum_cli: &'static str,
}

pub const VERSIONS: Versions = Versions { zerosum: zerosum::VERSION, zerosum_cli: env!("CARGO_PKG_VERSION") };
