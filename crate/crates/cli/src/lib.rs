//! Configuration and experiment runners behind the `dirichlet-lab` binary.

pub mod config;
pub mod experiments;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{run, RunError};
