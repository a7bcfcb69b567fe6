//! Seeded multi-run experiments.
//!
//! Each run builds a fresh environment and agent from the run's seed, so
//! runs share nothing and can execute in any order or in parallel. Results
//! are always reported in run order.

mod agent;
mod experiment;
mod export;
mod landscape;

pub use agent::{Agent, PlainQConfig, RandomSearchConfig, AGENT_IDS};
pub use experiment::{
    compare_agents, run_experiment, ComparisonRow, ComparisonTable, Execution, ExperimentResult,
    ExperimentSpec, RunResult, Summary,
};
pub use export::{
    read_results_json, write_comparison_csv, write_comparison_json, write_landscape_csv,
    write_results_csv, write_results_json, write_trace_csv, ResultsFile, SCHEMA_VERSION,
};
pub use landscape::{landscape_scan, Landscape, DISPLAY_SCALE};
