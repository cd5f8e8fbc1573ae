//! Experiment runner for the driven-atom waveguide junction: configs,
//! presets, artifact writers and the `junction` CLI.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod presets;
pub mod runner;
pub mod spectrum;

use std::path::Path;

pub use artifacts::FileEntry;
pub use config::ExperimentConfig;
pub use error::{Result, SimError};
pub use runner::{simulate, RunOutput};

/// Runs `config` and writes its artifacts into `out_dir`.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<(RunOutput, Vec<FileEntry>)> {
    let run = simulate(config)?;
    let files = artifacts::write_outputs(&run, out_dir)?;
    Ok((run, files))
}
