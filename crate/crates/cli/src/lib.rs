//! Command-line front end for the `brachistochrone` crate: JSON interchange,
//! run reports and the seeded verification suites.

pub mod commands;
pub mod error;
pub mod json;
pub mod report;
pub mod verify;

pub use commands::{run, Cli, Command};
pub use error::{CliError, CliResult};
