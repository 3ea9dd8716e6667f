//! Command-line front end: config loading, commands, CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run_command, Command, CommandError, Options};
pub use config::{load_config, MarketConfig};
pub use output::{emit, Format, RunOutput};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_CONDITION_FAILED: i32 = 2;
