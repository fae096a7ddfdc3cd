//! Experiment runner for the `tvopt-core` toolkit: TOML configs, built-in
//! presets, CSV outputs with checksummed manifests, parameter sweeps and
//! plot-data reports.

pub mod config;
mod error;
pub mod graph_io;
pub mod output;
pub mod presets;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use run::{run_experiment, RunSummary};
