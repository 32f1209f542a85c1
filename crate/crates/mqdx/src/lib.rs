//! File formats and the command-line driver around `mqdx-core`: input decks,
//! ASCII output in the plotting column layout, binary restart snapshots and
//! the `mqdx` subcommands.

pub mod benchmark;
pub mod cli;
pub mod deck;
pub mod error;
pub mod output;
pub mod restart;
pub mod setup;

pub use error::{CliError, Result};
