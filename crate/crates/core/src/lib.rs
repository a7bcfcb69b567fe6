//! Budget-constrained policy search for 5-year intervention planning.
//!
//! A policy assigns an (ITN, IRS) coverage pair to each of five years. An
//! agent may query the environment at most 100 times (20 episodes) before
//! committing to its best policy. This crate provides:
//!
//! - [`env`]: synthetic Gaussian-bump environments and the budget wrapper,
//! - [`agents`]: random search, a genetic algorithm, grid-based sequence
//!   breaking, three Gaussian-process Bayesian optimizers and Q-learning
//!   with first-year sequence breaking,
//! - [`harness`]: seeded multi-run experiments, comparison tables,
//!   landscape scans and CSV/JSON export.

pub mod action;
pub mod agents;
pub mod budget;
pub mod env;
pub mod error;
pub mod harness;
pub mod policy;
pub mod rng;

pub use action::{clamp_action, discretize_action_space, Action};
pub use budget::Budget;
pub use env::{BudgetedEnv, EnvConfig, EnvironmentModel, StepOutcome, SyntheticEnv};
pub use error::{Error, Result};
pub use policy::{EpisodeRecord, PartialPolicy, Policy, HORIZON};
pub use rng::SeededRng;
pub use harness::{run_experiment, ExperimentSpec};
