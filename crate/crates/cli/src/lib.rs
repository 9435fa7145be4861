//! Command-line drivers and the HTTP session service.

pub mod commands;
pub mod server;

pub use commands::{run, Cli, Command, Failure, Format};
