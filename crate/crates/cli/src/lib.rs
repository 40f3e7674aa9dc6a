//! Scenario layer of the `dispcancel` command-line tool: configuration,
//! named runs on top of `dispcancel-core`, and deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

pub use config::{DelaySpan, ScenarioConfig};
pub use error::{CliError, EXIT_COMPUTATION, EXIT_IO, EXIT_USAGE};
pub use output::{OutputFormat, OutputSink};
pub use scenarios::{
    reproduce_fig3, run_bk7_beta, run_classical_scan, run_inequality_check, run_quantum_correlation,
    run_sweep, Fig3Panel, GlassDispersion, RunSummary, SweepParameter,
};
