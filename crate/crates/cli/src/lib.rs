//! Experiment runner: configuration, the per-subcommand pipeline and the
//! summary report.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{emit_report, Report};
pub use run::{run_experiment, Command};
