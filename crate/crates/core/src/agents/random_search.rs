use crate::env::{BudgetedEnv, EnvironmentModel};
use crate::error::{Error, Result};
use crate::policy::{better_of, EpisodeRecord, Policy, HORIZON};
use crate::rng::SeededRng;

/// Evaluates uniformly random policies until the episode budget is spent
/// and returns the best one.
pub fn run_random_search<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    rng: &mut SeededRng,
) -> Result<EpisodeRecord> {
    run_random_search_scored(env, rng, HORIZON)
}

/// Random search ranking episodes by the sum of their first `years` rewards.
pub fn run_random_search_scored<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    rng: &mut SeededRng,
    years: usize,
) -> Result<EpisodeRecord> {
    let mut best = None;
    while env.budget().can_run_episode() {
        let record = env.evaluate_policy(&Policy::uniform(rng))?;
        best = better_of(best, record, |r| r.sub_total(years));
    }
    best.ok_or(Error::BudgetExhausted)
}
