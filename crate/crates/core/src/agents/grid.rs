//! Full sequence breaking: every year is optimized independently by a
//! coarse grid pass followed by directional refinement.

use serde::{Deserialize, Serialize};

use super::refine::{refine_step, RefinementState};
use super::RewardCache;
use crate::action::{discretize_action_space, Action};
use crate::env::{BudgetedEnv, EnvironmentModel};
use crate::error::{Error, Result};
use crate::policy::{EpisodeRecord, Policy, HORIZON};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBreakConfig {
    pub grid_resolution: f64,
    pub refine_distance: f64,
}

impl Default for GridBreakConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 0.3,
            refine_distance: 0.1,
        }
    }
}

/// Upper bound on free (cached) refinement updates between two real probes.
const MAX_CACHED_HOPS: usize = 32;

/// Advances a refinement state past probes whose reward is already known.
pub(crate) fn skip_cached(
    mut state: RefinementState,
    cache: &RewardCache,
    distance: f64,
    rng: &mut SeededRng,
) -> RefinementState {
    for _ in 0..MAX_CACHED_HOPS {
        let (Some(r_next), Some(r_max)) = (cache.get(state.a_next), cache.get(state.a_max)) else {
            break;
        };
        state = refine_step(state, r_next, r_max, distance, rng);
    }
    state
}

/// Grid episodes play one grid point in all five years at once; the
/// remaining episodes refine every year around its own best in parallel.
///
/// The returned record assembles each year's best action with the reward
/// recorded for it; no extra episode is spent confirming it.
pub fn run_full_sequence_break<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &GridBreakConfig,
    rng: &mut SeededRng,
) -> Result<EpisodeRecord> {
    let grid = discretize_action_space(config.grid_resolution)?;
    let mut caches: Vec<RewardCache> = vec![RewardCache::default(); HORIZON];
    let mut best: Vec<Option<(Action, f64)>> = vec![None; HORIZON];

    for &g in &grid {
        if !env.budget().can_run_episode() {
            break;
        }
        let record = env.evaluate_policy(&Policy::constant(g))?;
        for y in 0..HORIZON {
            let r = record.yearly_rewards[y];
            caches[y].insert(g, r);
            if best[y].is_none_or(|(_, b)| r > b) {
                best[y] = Some((g, r));
            }
        }
    }
    let Some(_) = best[0] else {
        return Err(Error::BudgetExhausted);
    };

    let d = config.refine_distance;
    let mut states: Vec<RefinementState> = best
        .iter()
        .zip(&caches)
        .map(|(b, cache)| {
            let s = RefinementState::start(b.expect("grid pass ran").0, d, rng);
            skip_cached(s, cache, d, rng)
        })
        .collect();

    while env.budget().can_run_episode() {
        let probe = Policy::new(std::array::from_fn(|y| states[y].a_next));
        let record = env.evaluate_policy(&probe)?;
        for y in 0..HORIZON {
            let r = record.yearly_rewards[y];
            let s = states[y];
            caches[y].insert(s.a_next, r);
            let r_max = caches[y].get(s.a_max).expect("incumbent reward recorded");
            let next = refine_step(s, r, r_max, d, rng);
            states[y] = skip_cached(next, &caches[y], d, rng);
        }
    }

    let actions: [Action; HORIZON] = std::array::from_fn(|y| states[y].a_max);
    let rewards: [f64; HORIZON] =
        std::array::from_fn(|y| caches[y].get(actions[y]).expect("incumbent reward recorded"));
    Ok(EpisodeRecord::new(Policy::new(actions), rewards))
}
