//! Command-line driver: configuration, subcommands and output files.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_all, cmd_analyze, cmd_eval, cmd_index, cmd_match, Analysis, EvalTask};
pub use config::RunConfig;
