//! Library side of the `ast-crosswalk` command: configuration assembly,
//! solver runs with their on-disk artifacts, and summary comparison.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use compare::{compare_csv, compare_table};
pub use config::{apply_override, RunConfig, RunOptions, Solver};
pub use error::{CliError, Result};
pub use run::{run, RunOutcome, RunReport, RunSummary};

/// Process exit status for a finished run.
pub fn exit_code(summary: &RunSummary) -> i32 {
    match summary.outcome {
        RunOutcome::Collision => 0,
        RunOutcome::HorizonMiss => 2,
    }
}
