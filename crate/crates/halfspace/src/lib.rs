//! File formats, the benchmark runner and the command-line front end for
//! [`halfspace_core`].

pub mod cli;
pub mod config;
mod error;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{CliError, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK};
