//! CLI failure type and its process exit-code mapping.
//!
//! Every failure is either a configuration problem (the user can fix the
//! input) or a numerical/runtime problem (the computation itself failed).
//! The distinction is what scripts see: exit code 2 versus 3.

use thiserror::Error;

/// Exit code for configuration errors (bad JSON, inconsistent fields,
/// unknown presets). Matches clap's own usage-error code.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical or runtime failures (aborted runs, infeasible
/// step certification, unusable trace columns, I/O).
pub const EXIT_NUMERICAL: u8 = 3;

/// Failure of a CLI operation.
#[derive(Debug, Error)]
pub enum CliError {
    /// The input cannot be used as given.
    #[error("{0}")]
    Config(String),
    /// The computation failed or produced unusable values.
    #[error("{0}")]
    Numerical(String),
    /// Reading or writing an artifact failed.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// The process exit code this failure maps to.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numerical(_) | Self::Io(_) => EXIT_NUMERICAL,
        }
    }
}

/// Core library errors surface during runs, so they default to the
/// numerical bucket; configuration code maps them explicitly instead.
impl From<dualavg_core::Error> for CliError {
    fn from(e: dualavg_core::Error) -> Self {
        Self::Numerical(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
