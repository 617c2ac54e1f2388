//! Command-line harness: JSON configuration, run-log CSV, scripted
//! experiments and the `everkin` binary's entry point.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod runlog;

pub use config::{Config, ExperimentParams, LoopConfig, PoseSpec, CONFIG_ENV};
pub use runlog::{parse_runlog, write_runlog, RUNLOG_HEADER};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status: 1 for invalid input, 2 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 1,
            HarnessError::Io(_) => 2,
        }
    }
}
