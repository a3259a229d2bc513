//! Configuration-driven experiments on the complex Radon transform.

pub mod config;
pub mod fixtures;
pub mod run;

pub use config::{parse, ConfigError, Experiment, ExperimentKind};
pub use run::{execute, exit_code, Outcome};
