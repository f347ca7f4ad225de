//! Experiment runner for `haarwalk`: JSON configs and named presets,
//! deterministic CSV and JSON outputs, stable exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success |
//! | 1    | hypothesis failure (not aperiodic, a check did not hold) |
//! | 2    | strict aperiodicity undecided |
//! | 64   | usage or config error |
//! | 65   | resolution limit or cap reached |
//! | 74   | I/O error |

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{exit, RunError};
pub use runner::{run, with_threads, Command, RunOutcome, Scenario};
