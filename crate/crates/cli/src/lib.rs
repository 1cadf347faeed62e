//! Batch runner: builds a Toda model and field configuration from a TOML
//! file, sweeps a grid, and writes forms CSV, immersion CSV and a JSON report.

pub mod config;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use run::{run, RunOptions, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] toda_geometry::Error),
}

impl CliError {
    /// Process exit status for errors that stop a run before any artifact is written.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
