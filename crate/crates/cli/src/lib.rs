//! Configuration loading, experiment orchestration and CSV output for the
//! `ofulqr` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;
pub mod run;
pub mod sweep;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use error::{CliError, Result};
pub use reproduce::cmd_reproduce_paper;
pub use run::cmd_run;
pub use sweep::cmd_sweep;

/// Overrides the output directory of every subcommand when set.
pub const OUTPUT_DIR_ENV: &str = "OFULQR_OUTPUT_DIR";
