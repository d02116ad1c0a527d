//! Command-line front end for `qdwitness-core`: JSON configuration and state
//! files, noise sweeps written as CSV, structure checks and cost tables.

pub mod args;
pub mod commands;
pub mod exit;
pub mod state_file;
pub mod sweep;

pub use args::{Cli, Command, Format, SpecName, StatePreset};
pub use commands::run;
pub use exit::{exit_code, ConfigError};
