//! Command-line front end for `jsnorm-core`: argument parsing, input files, dispatch and
//! canonical JSON reports.

pub mod app;
pub mod commands;
pub mod suite;

pub use app::{Cli, Command};
pub use commands::{run, Outcome, Status};
