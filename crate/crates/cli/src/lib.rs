//! Command-line front end: network config files, angle arguments and the
//! `quann` subcommands.

pub mod angle;
pub mod commands;
pub mod config;

pub use commands::{run, Cli, CliError, Status};
pub use config::{parse_network_config, ConfigError, NetworkConfig};
