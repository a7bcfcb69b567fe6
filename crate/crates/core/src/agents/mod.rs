//! Policy-search agents. Each `run_*` function consumes a fresh
//! [`BudgetedEnv`](crate::env::BudgetedEnv) and returns its best episode.

mod bayesopt;
mod ga;
mod gp;
mod grid;
mod qlearning;
mod random_search;
mod refine;

use std::collections::HashMap;

pub use bayesopt::{
    bo1_year1_diagnostic, fit_boosting_weights, fit_boosting_weights_with, run_bo1, run_bo2,
    run_bo3, BlendSample, Bo1Trace, Bo3Trace, BoParams, BoostingWeights, FillerMode,
};
pub use ga::{
    assign_fitness, crossover, crossover_at, mutate, roulette_probabilities, roulette_select,
    run_ga, CrossoverMode, GaConfig, PopulationMember,
};
pub use gp::{gp_fit, ucb_acquire, GpHyper, GpModel, Predictor, UcbParams};
pub use grid::{run_full_sequence_break, GridBreakConfig};
pub use qlearning::{
    epsilon_greedy, epsilon_schedule, first_year_search, run_plain_qlearning,
    run_qlearning_seq_break, EpsilonSchedule, FirstYearResult, ProbeMode, QConfig, QSeqOutcome, QTable,
};
pub use random_search::{run_random_search, run_random_search_scored};
pub use refine::{neighbors, random_neighbor, refine_step, RefinementState};

use crate::action::Action;

/// Rewards keyed by action, snapped to 1e-9 so lattice points compare equal.
#[derive(Debug, Clone, Default)]
pub(crate) struct RewardCache {
    map: HashMap<(i64, i64), f64>,
}

impl RewardCache {
    fn key(a: Action) -> (i64, i64) {
        ((a.itn() * 1e9).round() as i64, (a.irs() * 1e9).round() as i64)
    }

    pub(crate) fn insert(&mut self, a: Action, reward: f64) {
        self.map.insert(Self::key(a), reward);
    }

    pub(crate) fn get(&self, a: Action) -> Option<f64> {
        self.map.get(&Self::key(a)).copied()
    }
}
