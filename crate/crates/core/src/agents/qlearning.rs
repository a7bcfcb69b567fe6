//! Tabular Q-learning over (year, discretized action), plus the
//! sequence-breaking variant that fixes year 1 by direct search first.
//!
//! States are years; the action set is the 10x10 lattice {0.0, ..., 0.9}^2.
//! Updates use a visit-count step size `1 / N(s, a)` with `N` starting at 1.

use serde::{Deserialize, Serialize};

use super::grid::skip_cached;
use super::refine::{refine_step, RefinementState};
use super::RewardCache;
use crate::action::Action;
use crate::env::{BudgetedEnv, EnvironmentModel};
use crate::error::{Error, Result};
use crate::policy::{better_of, EpisodeRecord, PartialPolicy, Policy, HORIZON};
use crate::rng::SeededRng;

const SIDE: usize = 10;
const ACTIONS: usize = SIDE * SIDE;

/// Phase-2 episode count the default schedule is written for.
const SCHEDULE_EPISODES: usize = 16;

/// Q values and visit counts for every (year, lattice action) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<[f64; ACTIONS]>,
    visits: Vec<[u64; ACTIONS]>,
}

impl Default for QTable {
    fn default() -> Self {
        Self::new()
    }
}

impl QTable {
    pub fn new() -> Self {
        Self {
            values: vec![[0.0; ACTIONS]; HORIZON],
            visits: vec![[1; ACTIONS]; HORIZON],
        }
    }

    /// Row-major lattice index of `a`, or an error when `a` is off the lattice.
    pub fn index_of(a: Action) -> Result<usize> {
        let coord = |v: f64| {
            let k = (v * SIDE as f64).round();
            ((v * SIDE as f64 - k).abs() < 1e-6 && (0.0..SIDE as f64).contains(&k))
                .then_some(k as usize)
        };
        match (coord(a.itn()), coord(a.irs())) {
            (Some(i), Some(j)) => Ok(i * SIDE + j),
            _ => Err(Error::invalid(format!("{a} is not on the 0.1 action lattice"))),
        }
    }

    pub fn action_at(index: usize) -> Action {
        Action::clamped(
            (index / SIDE) as f64 / SIDE as f64,
            (index % SIDE) as f64 / SIDE as f64,
        )
    }

    fn check_year(year: usize) -> Result<usize> {
        if (1..=HORIZON).contains(&year) {
            Ok(year - 1)
        } else {
            Err(Error::invalid(format!("year {year} outside 1..={HORIZON}")))
        }
    }

    pub fn value(&self, year: usize, a: Action) -> Result<f64> {
        Ok(self.values[Self::check_year(year)?][Self::index_of(a)?])
    }

    pub fn visits(&self, year: usize, a: Action) -> Result<u64> {
        Ok(self.visits[Self::check_year(year)?][Self::index_of(a)?])
    }

    pub fn set_value(&mut self, year: usize, a: Action, q: f64) -> Result<()> {
        self.values[Self::check_year(year)?][Self::index_of(a)?] = q;
        Ok(())
    }

    pub fn set_visits(&mut self, year: usize, a: Action, n: u64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("visit counts start at 1"));
        }
        self.visits[Self::check_year(year)?][Self::index_of(a)?] = n;
        Ok(())
    }

    pub fn max_value(&self, year: usize) -> Result<f64> {
        let row = &self.values[Self::check_year(year)?];
        Ok(row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    /// Greedy action for `year`; ties go to the lowest lattice index.
    pub fn argmax(&self, year: usize) -> Result<Action> {
        let row = &self.values[Self::check_year(year)?];
        let mut best = 0;
        for (i, &q) in row.iter().enumerate() {
            if q > row[best] {
                best = i;
            }
        }
        Ok(Self::action_at(best))
    }

    /// `Q += (R + gamma * max Q(next) - Q) / N`, then `N += 1`. A `None`
    /// next year is terminal and bootstraps from 0. Returns the new Q value.
    pub fn update(
        &mut self,
        year: usize,
        a: Action,
        reward: f64,
        next_year: Option<usize>,
        gamma: f64,
    ) -> Result<f64> {
        let y = Self::check_year(year)?;
        let i = Self::index_of(a)?;
        let bootstrap = match next_year {
            Some(next) => self.max_value(next)?,
            None => 0.0,
        };
        let n = self.visits[y][i] as f64;
        let q = &mut self.values[y][i];
        *q += (reward + gamma * bootstrap - *q) / n;
        self.visits[y][i] += 1;
        Ok(*q)
    }

    /// The greedy action of every year.
    pub fn greedy_policy(&self) -> Policy {
        Policy::new(std::array::from_fn(|y| {
            self.argmax(y + 1).expect("year in range")
        }))
    }
}

/// How phase 1 of the sequence-breaking agent spends its year-1 probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    /// Probes fill every step of the first episodes in order; rewards from
    /// later-year slots stand in for the year-1 surface.
    Packed,
    /// One probe per episode, in year 1 only; years 2-5 replay the
    /// incumbent. Leaves fewer episodes for phase 2.
    FirstslotOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QConfig {
    pub gamma: f64,
    pub epsilon0: f64,
    pub episodes_phase2: usize,
    pub grid_resolution_coarse: f64,
    pub grid_resolution_fine: f64,
    pub refine_distance: f64,
    pub refine_probes: usize,
    pub probe_mode: ProbeMode,
    /// Seed the years 2-5 Q-table with the steps played during the year-1 search.
    pub learn_from_probes: bool,
}

impl Default for QConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            epsilon0: 0.8,
            episodes_phase2: 16,
            grid_resolution_coarse: 0.3,
            grid_resolution_fine: 0.1,
            refine_distance: 0.1,
            refine_probes: 4,
            probe_mode: ProbeMode::Packed,
            learn_from_probes: true,
        }
    }
}

impl QConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return Err(Error::invalid("epsilon0 must lie in [0, 1]"));
        }
        if (self.grid_resolution_fine - 0.1).abs() > 1e-12 {
            return Err(Error::invalid("the Q-table lattice is fixed at 0.1"));
        }
        if !(self.refine_distance > 0.0 && self.refine_distance <= 1.0) {
            return Err(Error::invalid("refine_distance must lie in (0, 1]"));
        }
        crate::action::grid_axis(self.grid_resolution_coarse)?;
        Ok(())
    }
}

/// Exploration-rate schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EpsilonSchedule {
    /// `start - e / (1.2 * episodes)`: the 16-episode rule stretched to any length.
    Stretched { start: f64, episodes: usize },
    /// Straight line from `start` at episode 0 to `end` at the last episode.
    Linear { start: f64, end: f64, episodes: usize },
}

impl EpsilonSchedule {
    pub fn value(&self, e: usize) -> f64 {
        match *self {
            Self::Stretched { start, episodes } => {
                (start - e as f64 / (1.2 * episodes.max(1) as f64)).clamp(0.0, 1.0)
            }
            Self::Linear {
                start,
                end,
                episodes,
            } => {
                if episodes <= 1 {
                    return start;
                }
                let t = (e.min(episodes - 1)) as f64 / (episodes - 1) as f64;
                start + (end - start) * t
            }
        }
    }
}

/// Phase-2 exploration rate: `0.8 - e / 19.2` for episode index `e` in 0..16.
pub fn epsilon_schedule(e: usize) -> Result<f64> {
    if e >= SCHEDULE_EPISODES {
        return Err(Error::invalid(format!("episode index {e} outside 0..16")));
    }
    Ok(0.8 - e as f64 / (SCHEDULE_EPISODES as f64 * 1.2))
}

/// Uniform lattice action with probability `epsilon`, else the greedy one.
pub fn epsilon_greedy(table: &QTable, year: usize, epsilon: f64, rng: &mut SeededRng) -> Result<Action> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::invalid("epsilon must lie in [0, 1]"));
    }
    if rng.unit() < epsilon {
        Ok(QTable::action_at(rng.index(ACTIONS)))
    } else {
        table.argmax(year)
    }
}

/// Outcome of the year-1 direct search.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstYearResult {
    pub a_max: Action,
    pub reward_max: f64,
    /// Every probe in the order it was evaluated, with the reward credited to it.
    pub probes: Vec<(Action, f64)>,
    pub episodes_used: u32,
    /// Best complete episode seen during the search.
    pub best_episode: Option<EpisodeRecord>,
    /// The episode in which `a_max` itself was played in year 1, if any.
    pub a_max_episode: Option<EpisodeRecord>,
    /// Every `(year, action, reward)` step played, in order.
    pub steps: Vec<(usize, Action, f64)>,
}

/// Coarse grid in serpentine order, so consecutive probes stay close.
fn serpentine(resolution: f64) -> Result<Vec<Action>> {
    let axis = crate::action::grid_axis(resolution)?;
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for (row, &x) in axis.iter().enumerate() {
        let ys: Vec<f64> = if row % 2 == 0 {
            axis.clone()
        } else {
            axis.iter().rev().copied().collect()
        };
        out.extend(ys.into_iter().map(|y| Action::clamped(x, y)));
    }
    Ok(out)
}

struct Search {
    cache: RewardCache,
    probes: Vec<(Action, f64)>,
    best: Option<(Action, f64)>,
}

impl Search {
    fn record(&mut self, a: Action, r: f64) {
        self.cache.insert(a, r);
        self.probes.push((a, r));
        if self.best.is_none_or(|(_, b)| r > b) {
            self.best = Some((a, r));
        }
    }
}

/// Year-1 direct search: the coarse grid, then `refine_probes` directional
/// refinement probes around the incumbent. Probes already measured are reused.
pub fn first_year_search<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &QConfig,
    rng: &mut SeededRng,
) -> Result<FirstYearResult> {
    config.validate()?;
    let grid = serpentine(config.grid_resolution_coarse)?;
    match config.probe_mode {
        ProbeMode::Packed => packed_search(env, config, &grid, rng),
        ProbeMode::FirstslotOnly => firstslot_search(env, config, &grid, rng),
    }
}

fn packed_search<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &QConfig,
    grid: &[Action],
    rng: &mut SeededRng,
) -> Result<FirstYearResult> {
    let total = grid.len() + config.refine_probes;
    let episodes = total.div_ceil(HORIZON);
    if (env.budget().remaining_episodes() as usize) < episodes {
        return Err(Error::BudgetExhausted);
    }
    let d = config.refine_distance;
    let mut search = Search {
        cache: RewardCache::default(),
        probes: Vec::with_capacity(total),
        best: None,
    };
    let mut state: Option<RefinementState> = None;
    let mut best_episode = None;
    let mut played_episodes: Vec<EpisodeRecord> = Vec::with_capacity(episodes);
    let mut steps = Vec::with_capacity(episodes * HORIZON);
    let mut slot = 0usize;

    for _ in 0..episodes {
        env.reset()?;
        let mut played = PartialPolicy::new();
        let mut rewards = [0.0; HORIZON];
        for y in 0..HORIZON {
            let action = if slot < grid.len() {
                Some(grid[slot])
            } else if slot < total {
                let s = match state {
                    Some(s) => s,
                    None => {
                        let (a, _) = search.best.expect("grid probed first");
                        skip_cached(RefinementState::start(a, d, rng), &search.cache, d, rng)
                    }
                };
                state = Some(s);
                Some(s.a_next)
            } else {
                None
            };
            // Leftover slots in the last probe episode replay the incumbent.
            let action = action.unwrap_or_else(|| search.best.expect("probed").0);
            let r = env.step(action)?.reward;
            rewards[y] = r;
            played.push(action)?;
            steps.push((y + 1, action, r));
            if slot < total {
                search.record(action, r);
                if let Some(s) = state {
                    let r_max = search.cache.get(s.a_max).expect("incumbent recorded");
                    let next = refine_step(s, r, r_max, d, rng);
                    state = Some(skip_cached(next, &search.cache, d, rng));
                }
            }
            slot += 1;
        }
        let record = EpisodeRecord::new(played.complete()?, rewards);
        played_episodes.push(record.clone());
        best_episode = better_of(best_episode, record, |r| r.total);
    }
    let (a_max, reward_max) = incumbent(&search, state)?;
    Ok(FirstYearResult {
        a_max,
        reward_max,
        probes: search.probes,
        episodes_used: episodes as u32,
        best_episode,
        a_max_episode: best_with_first(played_episodes, a_max),
        steps,
    })
}

fn firstslot_search<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &QConfig,
    grid: &[Action],
    rng: &mut SeededRng,
) -> Result<FirstYearResult> {
    let d = config.refine_distance;
    let mut search = Search {
        cache: RewardCache::default(),
        probes: Vec::new(),
        best: None,
    };
    let mut state: Option<RefinementState> = None;
    let mut best_episode = None;
    let mut by_first: Vec<EpisodeRecord> = Vec::new();
    let mut steps = Vec::new();
    let mut episodes = 0u32;

    for k in 0..grid.len() + config.refine_probes {
        if !env.budget().can_run_episode() {
            break;
        }
        let probe = if k < grid.len() {
            grid[k]
        } else {
            let s = state.unwrap_or_else(|| {
                let (a, _) = search.best.expect("grid probed first");
                skip_cached(RefinementState::start(a, d, rng), &search.cache, d, rng)
            });
            state = Some(s);
            s.a_next
        };
        let filler = search.best.map_or(probe, |(a, _)| a);
        let policy = Policy::constant(filler).with_year(1, probe);
        let record = env.evaluate_policy(&policy)?;
        episodes += 1;
        for (y, (a, r)) in policy.actions().iter().zip(record.yearly_rewards).enumerate() {
            steps.push((y + 1, *a, r));
        }
        let r = record.yearly_rewards[0];
        search.record(probe, r);
        if let Some(s) = state {
            let r_max = search.cache.get(s.a_max).expect("incumbent recorded");
            state = Some(skip_cached(refine_step(s, r, r_max, d, rng), &search.cache, d, rng));
        }
        by_first.push(record.clone());
        best_episode = better_of(best_episode, record, |r| r.total);
    }
    let (a_max, reward_max) = incumbent(&search, state)?;
    let a_max_episode = best_with_first(by_first, a_max);
    Ok(FirstYearResult {
        a_max,
        reward_max,
        probes: search.probes,
        episodes_used: episodes,
        best_episode,
        a_max_episode,
        steps,
    })
}

fn best_with_first(records: Vec<EpisodeRecord>, first: Action) -> Option<EpisodeRecord> {
    records
        .into_iter()
        .filter(|r| r.policy.year(1) == first)
        .fold(None, |acc, r| better_of(acc, r, |r| r.total))
}

fn incumbent(search: &Search, state: Option<RefinementState>) -> Result<(Action, f64)> {
    let a = match state {
        Some(s) => s.a_max,
        None => search.best.ok_or(Error::BudgetExhausted)?.0,
    };
    let r = search.cache.get(a).ok_or(Error::BudgetExhausted)?;
    Ok((a, r))
}

/// Plays one epsilon-greedy episode over `years`, updating the table after
/// every step. Year-1 is fixed to `first` when given.
fn q_episode<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    table: &mut QTable,
    first: Option<Action>,
    epsilon: f64,
    gamma: f64,
    rng: &mut SeededRng,
) -> Result<EpisodeRecord> {
    env.reset()?;
    let mut played = PartialPolicy::new();
    let mut rewards = [0.0; HORIZON];
    for year in 1..=HORIZON {
        let fixed = if year == 1 { first } else { None };
        let action = match fixed {
            Some(a) => a,
            None => epsilon_greedy(table, year, epsilon, rng)?,
        };
        let r = env.step(action)?.reward;
        if fixed.is_none() {
            let next = (year < HORIZON).then_some(year + 1);
            table.update(year, action, r, next, gamma)?;
        }
        rewards[year - 1] = r;
        played.push(action)?;
    }
    Ok(EpisodeRecord::new(played.complete()?, rewards))
}

/// Standard tabular Q-learning over all five years for `episodes` episodes
/// (or until the budget runs out). Returns the best episode and the table.
pub fn run_plain_qlearning<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &QConfig,
    schedule: EpsilonSchedule,
    episodes: usize,
    rng: &mut SeededRng,
) -> Result<(EpisodeRecord, QTable)> {
    config.validate()?;
    let mut table = QTable::new();
    let mut best = None;
    for e in 0..episodes {
        if !env.budget().can_run_episode() {
            break;
        }
        let record = q_episode(env, &mut table, None, schedule.value(e), config.gamma, rng)?;
        best = better_of(best, record, |r| r.total);
    }
    Ok((best.ok_or(Error::BudgetExhausted)?, table))
}

/// Result of the sequence-breaking agent.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeqOutcome {
    /// Best episode whose year-1 action is `first_year.a_max`.
    pub best: EpisodeRecord,
    pub first_year: FirstYearResult,
    pub table: QTable,
}

/// Year 1 by direct search, then Q-learning on years 2-5 with year 1
/// pinned to the incumbent.
pub fn run_qlearning_seq_break<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &QConfig,
    rng: &mut SeededRng,
) -> Result<QSeqOutcome> {
    let first_year = first_year_search(env, config, rng)?;
    let a_max = first_year.a_max;
    let episodes = config
        .episodes_phase2
        .min(env.budget().remaining_episodes() as usize);
    let schedule = EpsilonSchedule::Stretched {
        start: config.epsilon0,
        episodes,
    };
    let default_rule = episodes == SCHEDULE_EPISODES && config.epsilon0 == 0.8;
    let mut table = QTable::new();
    if config.learn_from_probes {
        for &(year, a, r) in &first_year.steps {
            if year > 1 && QTable::index_of(a).is_ok() {
                let next = (year < HORIZON).then_some(year + 1);
                table.update(year, a, r, next, config.gamma)?;
            }
        }
    }
    let mut best = first_year.a_max_episode.clone();
    for e in 0..episodes {
        let epsilon = if default_rule {
            epsilon_schedule(e)?
        } else {
            schedule.value(e)
        };
        let record = q_episode(env, &mut table, Some(a_max), epsilon, config.gamma, rng)?;
        best = better_of(best, record, |r| r.total);
    }
    let best = match best {
        Some(b) => b,
        None => {
            // No episode ever played a_max in year 1: report the greedy
            // completion with the recorded year-1 reward only.
            let policy = table.greedy_policy().with_year(1, a_max);
            let mut rewards = [0.0; HORIZON];
            rewards[0] = first_year.reward_max;
            EpisodeRecord::new(policy, rewards)
        }
    };
    Ok(QSeqOutcome {
        best,
        first_year,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{default_env_a, EnvConfigA, SyntheticEnv, YearSurface};
    use proptest::prelude::*;

    fn a(x: f64, y: f64) -> Action {
        Action::new(x, y).unwrap()
    }

    #[test]
    fn zero_bootstrap_update() {
        let mut t = QTable::new();
        assert_eq!(t.update(1, a(0.3, 0.4), 10.0, Some(2), 0.9).unwrap(), 10.0);
        assert_eq!(t.visits(1, a(0.3, 0.4)).unwrap(), 2);
    }

    #[test]
    fn hand_computed_update() {
        let mut t = QTable::new();
        t.set_value(2, a(0.5, 0.5), 2.0).unwrap();
        t.set_visits(2, a(0.5, 0.5), 2).unwrap();
        t.set_value(3, a(0.1, 0.9), 6.0).unwrap();
        assert_eq!(t.update(2, a(0.5, 0.5), 4.0, Some(3), 0.5).unwrap(), 4.5);
    }

    #[test]
    fn zero_reward_is_fixed_point() {
        let mut t = QTable::new();
        for y in 1..=HORIZON {
            let next = (y < HORIZON).then_some(y + 1);
            t.update(y, a(0.0, 0.0), 0.0, next, 0.7).unwrap();
        }
        assert_eq!(t, {
            let mut u = QTable::new();
            for y in 1..=HORIZON {
                u.set_visits(y, a(0.0, 0.0), 2).unwrap();
            }
            u
        });
    }

    #[test]
    fn off_lattice_rejected() {
        let mut t = QTable::new();
        assert!(t.update(1, a(0.25, 0.3), 1.0, None, 0.9).is_err());
        assert!(t.update(1, a(1.0, 0.3), 1.0, None, 0.9).is_err());
        assert!(t.update(0, a(0.2, 0.3), 1.0, None, 0.9).is_err());
    }

    #[test]
    fn lattice_index_round_trip() {
        for i in 0..ACTIONS {
            assert_eq!(QTable::index_of(QTable::action_at(i)).unwrap(), i);
        }
    }

    #[test]
    fn schedule_values() {
        assert_eq!(epsilon_schedule(0).unwrap(), 0.8);
        assert!((epsilon_schedule(15).unwrap() - 0.01875).abs() < 1e-9);
        assert!((epsilon_schedule(8).unwrap() - 0.383_333_333_3).abs() < 1e-9);
        assert!(epsilon_schedule(16).is_err());
        let v: Vec<f64> = (0..16).map(|e| epsilon_schedule(e).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]));
        assert!(v.iter().all(|&e| e > 0.0 && e <= 0.8));
        let stretched = EpsilonSchedule::Stretched { start: 0.8, episodes: 16 };
        for (e, x) in v.iter().enumerate() {
            assert!((stretched.value(e) - x).abs() < 1e-12);
        }
        let lin = EpsilonSchedule::Linear { start: 0.8, end: 0.05, episodes: 200 };
        assert_eq!(lin.value(0), 0.8);
        assert!((lin.value(199) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn greedy_picks_unique_max() {
        let mut t = QTable::new();
        t.set_value(3, a(0.7, 0.2), 5.0).unwrap();
        let mut rng = SeededRng::new(1);
        for _ in 0..100 {
            assert_eq!(epsilon_greedy(&t, 3, 0.0, &mut rng).unwrap(), a(0.7, 0.2));
        }
    }

    #[test]
    fn greedy_ties_go_to_lowest_index() {
        let t = QTable::new();
        assert_eq!(epsilon_greedy(&t, 1, 0.0, &mut SeededRng::new(2)).unwrap(), a(0.0, 0.0));
        let mut t = QTable::new();
        t.set_value(1, a(0.4, 0.4), 1.0).unwrap();
        t.set_value(1, a(0.2, 0.9), 1.0).unwrap();
        assert_eq!(t.argmax(1).unwrap(), a(0.2, 0.9));
    }

    #[test]
    fn full_exploration_is_uniform() {
        let t = QTable::new();
        let mut rng = SeededRng::new(2019);
        let n = 100_000;
        let mut counts = [0u32; ACTIONS];
        for _ in 0..n {
            counts[QTable::index_of(epsilon_greedy(&t, 2, 1.0, &mut rng).unwrap()).unwrap()] += 1;
        }
        let expected = n as f64 / ACTIONS as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 99.9th percentile of chi-square with 99 degrees of freedom.
        assert!(chi2 < 148.23, "chi2 = {chi2}");
    }

    proptest! {
        #[test]
        fn terminal_entries_are_running_means(
            rewards in prop::collection::vec(-100.0f64..100.0, 1..40),
            gamma in 0.0f64..=1.0,
        ) {
            let mut t = QTable::new();
            let cell = a(0.6, 0.1);
            for &r in &rewards {
                t.update(HORIZON, cell, r, None, gamma).unwrap();
            }
            let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
            prop_assert!((t.value(HORIZON, cell).unwrap() - mean).abs() < 1e-9);
            prop_assert_eq!(t.visits(HORIZON, cell).unwrap(), rewards.len() as u64 + 1);
        }
    }

    fn bump_env(center: Action) -> BudgetedEnv<SyntheticEnv> {
        BudgetedEnv::with_default_budget(SyntheticEnv::new(EnvConfigA::separable(
            YearSurface::single(center, 100.0, 0.15),
        )))
    }

    #[test]
    fn grid_probes_cover_coarse_grid() {
        let mut env = bump_env(a(0.5, 0.5));
        let r = first_year_search(&mut env, &QConfig::default(), &mut SeededRng::new(3)).unwrap();
        assert_eq!(r.episodes_used, 4);
        assert_eq!(env.budget().used_evaluations(), 20);
        let mut seen: Vec<(u64, u64)> = r.probes[..16]
            .iter()
            .map(|(p, _)| ((p.itn() * 10.0).round() as u64, (p.irs() * 10.0).round() as u64))
            .collect();
        seen.sort();
        let mut want: Vec<(u64, u64)> = [0, 3, 6, 9]
            .iter()
            .flat_map(|&x| [0, 3, 6, 9].map(move |y| (x, y)))
            .collect();
        want.sort();
        assert_eq!(seen, want);
        assert_eq!(r.probes.len(), 20);
    }

    #[test]
    fn on_grid_bump_kept() {
        let mut env = bump_env(a(0.3, 0.6));
        let r = first_year_search(&mut env, &QConfig::default(), &mut SeededRng::new(4)).unwrap();
        assert_eq!(r.a_max, a(0.3, 0.6));
    }

    #[test]
    fn default_env_year1_near_scan_optimum() {
        let cfg = default_env_a();
        let scan = cfg.years[0].scan_max(40);
        for seed in 0..10 {
            let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(cfg.clone()));
            let r = first_year_search(&mut env, &QConfig::default(), &mut SeededRng::new(seed))
                .unwrap();
            let truth = cfg.years[0].value(r.a_max);
            assert!(truth >= 0.9 * scan, "seed {seed}: {} -> {truth} vs {scan}", r.a_max);
        }
    }

    #[test]
    fn seq_break_spends_budget_and_pins_year1() {
        for seed in 0..5 {
            let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(default_env_a()));
            let out = run_qlearning_seq_break(&mut env, &QConfig::default(), &mut SeededRng::new(seed))
                .unwrap();
            assert_eq!(env.budget().used_evaluations(), 100);
            assert_eq!(env.budget().used_episodes(), 20);
            assert_eq!(out.best.policy.year(1), out.first_year.a_max);
        }
    }

    #[test]
    fn firstslot_mode_shrinks_phase_two() {
        let cfg = QConfig {
            probe_mode: ProbeMode::FirstslotOnly,
            ..QConfig::default()
        };
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(default_env_a()));
        let out = run_qlearning_seq_break(&mut env, &cfg, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.first_year.episodes_used, 20);
        assert_eq!(env.budget().used_episodes(), 20);
        assert_eq!(out.best.policy.year(1), out.first_year.a_max);
    }

    #[test]
    fn plain_q_on_null_env_keeps_terminal_zero() {
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(EnvConfigA::null()));
        let schedule = EpsilonSchedule::Stretched { start: 0.8, episodes: 20 };
        let (_, table) =
            run_plain_qlearning(&mut env, &QConfig::default(), schedule, 20, &mut SeededRng::new(0))
                .unwrap();
        assert_eq!(env.budget().used_evaluations(), 100);
        assert!(table.values[HORIZON - 1].iter().all(|&q| q == 0.0));
    }

    #[test]
    fn converged_greedy_rollout_hits_bump() {
        let center = a(0.6, 0.3);
        let mut env = BudgetedEnv::new(
            SyntheticEnv::new(EnvConfigA::separable(YearSurface::single(center, 100.0, 0.15))),
            crate::Budget::episodes(2000),
        );
        let schedule = EpsilonSchedule::Linear { start: 0.8, end: 0.05, episodes: 2000 };
        let (_, table) =
            run_plain_qlearning(&mut env, &QConfig::default(), schedule, 2000, &mut SeededRng::new(9))
                .unwrap();
        for (y, act) in table.greedy_policy().actions().iter().enumerate() {
            assert!(act.squared_distance(center).sqrt() <= 0.15, "year {}: {act}", y + 1);
        }
    }
}
