//! File formats and command-line driver for `jms-core`.

pub mod cli;
pub mod error;
pub mod format;

pub use error::CliError;
