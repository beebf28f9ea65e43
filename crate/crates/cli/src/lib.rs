//! Command-line front end for the `switchfn` library.

pub mod args;
pub mod commands;
pub mod funcspec;
pub mod output;
pub mod psi;

pub use commands::{execute, CliError};
