//! JSON-configured experiments over `effort-contracts`, reported as CSV.

pub mod commands;
pub mod config;
mod error;
pub mod table;

pub use commands::{run, Command, Overrides};
pub use config::ExperimentConfig;
pub use error::{CliError, Result};
