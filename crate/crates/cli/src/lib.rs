//! Batch driver: reads an experiment config, runs the selected checks and
//! writes `report.json` plus CSV tables into an output directory.

pub mod config;
pub mod report;
pub mod run;

pub use config::ExperimentConfig;
pub use report::{CheckRecord, ExperimentReport, Table};
pub use run::{run, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] orbitrep::Error),
}

impl CliError {
    /// Usage, config and i/o problems all map to 2.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
