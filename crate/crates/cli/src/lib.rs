//! Command-line front end for the lambda-coin workbench.

#![allow(clippy::result_large_err)]

pub mod args;
pub mod commands;
pub mod input;

pub use args::Cli;
pub use commands::{run, Outcome};
