//! Library side of the `betamax` command-line tool: argument types,
//! subcommand implementations and the JSON envelope.

pub mod args;
pub mod commands;
pub mod output;

pub use args::Cli;
pub use commands::{run, CliError, Outcome};
