//! Command-line front end: flat JSON configuration, command dispatch and
//! machine-readable output.
//!
//! Every command reads a [`RunConfig`] and produces an [`Emitted`] artifact
//! (JSON or CSV with floats at 17 significant digits) plus an optional JSON
//! summary. Failures carry an exit code and a JSON diagnostic.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod sweep;
pub mod trajectory;

pub use commands::{run_command, Command, Emitted, Request};
pub use config::{parse_config, OutputFormat, Preset, RegimeChoice, RunConfig};
pub use error::{CliError, CliResult};
pub use sweep::{parse_sweep_spec, SweepSpec};
pub use trajectory::{parse_trajectory, TrajectoryTable};

/// Exit code for runs that completed but missed a requested tolerance.
pub const EXIT_TOLERANCE: u8 = 5;
