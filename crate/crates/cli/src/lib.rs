//! File formats, experiments and the command-line front end for `crdisc-core`.

pub mod config;
pub mod disc;
pub mod error;
pub mod experiments;
pub mod model;
pub mod output;

pub use config::{config_from_flags, validate_config, Experiment, ExperimentConfig, Overrides};
pub use error::CliError;
pub use experiments::run_experiment;
pub use output::ExperimentResult;
