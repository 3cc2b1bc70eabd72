//! Library side of the `tumorlevy` command-line tool.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod plot;
pub mod validate;

pub use commands::{
    cmd_escape, cmd_figure, cmd_mc, cmd_met, cmd_sweep, Quantity, SweepParam, SweepSpec,
};
pub use config::{Overrides, Resolved, RunConfig};
pub use error::{CliError, CliResult};

/// Environment variable overriding the worker thread count.
pub const WORKERS_ENV: &str = "TUMORLEVY_WORKERS";
