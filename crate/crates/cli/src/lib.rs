//! Command-line front end: scenario generation, feasibility checks, solving,
//! grid search, surface export and canned reproductions.

pub mod args;
pub mod cases;
pub mod commands;

pub use args::Cli;
pub use commands::{exit_code, run};
