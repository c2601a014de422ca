//! Staged command-line pipeline over the lyricscope library.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod fixture;
pub mod workspace;

pub use cli::{run, Cli, Command};
pub use config::ProjectConfig;
pub use error::{CliError, CliResult};
