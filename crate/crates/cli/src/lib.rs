//! Command line front end for `coarsekit-core`: a JSON document format,
//! reports with verdicts, and the commands that produce them.

mod args;
mod commands;
pub mod doc;
pub mod report;
pub mod witness;

pub use commands::{
    run, Outcome, EXIT_CANTCREAT, EXIT_DATA, EXIT_NOINPUT, EXIT_USAGE, PINCH_TOL_VAR,
};
