//! File formats, reproducible runs and the command-line front end for
//! `mrz-core`.
//!
//! Every command writes a CSV table and a JSON summary under `--out`, plus a
//! manifest from which `mrz rerun` repeats the run bit for bit. Exit codes:
//! 0 pass, 1 usage, 2 failed check, 3 I/O.

pub mod cli;
pub mod commands;
pub mod error;
pub mod io;
pub mod output;
pub mod parallel;

pub use cli::{run, Cli};
pub use error::{CliError, Status};
