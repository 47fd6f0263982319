//! Table ingestion, JSON reports and the command-line driver on top of `intobs-core`.
pub mod algebra;
pub mod cli;
pub mod config;
mod error;
pub mod report;
pub mod table_io;

pub use error::CliError;
