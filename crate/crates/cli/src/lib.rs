//! Experiment driver for NARX structure selection.

pub mod args;
pub mod commands;
pub mod config;

pub use commands::{cmd_generate, cmd_identify, cmd_report, cmd_sweep, cmd_validate, Manifest, Sidecar};
pub use config::{Algorithm, ExperimentConfig};
