//! Command-line front end for `mcarch`: configuration, subcommands and CSV
//! output. The binary in `main.rs` is a thin wrapper around this library.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{cmd_evaluate, cmd_forecast, cmd_market_fit, cmd_simulate, cmd_weights};
pub use config::{Overrides, RunConfig};
pub use error::CliError;
