//! Command-line front end for `semctx`: scenario files, the built-in catalog
//! and the `validate`, `rate`, `simulate`, `sweep` and `catalog` commands.
//!
//! Exit codes: 0 success, 2 I/O or parse error, 3 invalid scenario tables,
//! 4 scenario/context mismatch, 5 budget exceeded.

pub mod catalog;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;

pub use cli::{run, run_args, Cli};
pub use error::CliError;
