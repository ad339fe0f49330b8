//! Configuration, commands and output formatting behind the `qdynmaps` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, CliError, COMMANDS};
pub use config::{ConfigError, ExperimentConfig};
