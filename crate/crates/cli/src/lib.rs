//! Command-line studies of local large deviations for decoupled renewal
//! processes. Each study writes one CSV table.

pub mod config;
pub mod output;
pub mod studies;

use std::path::PathBuf;

pub use config::{ExperimentConfig, Study, Tolerances};
pub use output::{emit_csv, read_table, write_table, Table};
pub use studies::{log_log_slope, run_study, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("numerical failure: {0}")]
    Numerical(decoupled_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("time budget exceeded after {completed} of {total} rows")]
    Budget { completed: usize, total: usize },
}

impl From<decoupled_core::Error> for CliError {
    fn from(e: decoupled_core::Error) -> Self {
        match e {
            decoupled_core::Error::Hypothesis(m) => Self::Hypothesis(m),
            other => Self::Numerical(other),
        }
    }
}

impl CliError {
    /// `1` for configuration problems, `2` for failures during the run.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Hypothesis(_) | Self::Io { .. } => 1,
            Self::Numerical(_) | Self::Budget { .. } => 2,
        }
    }
}
