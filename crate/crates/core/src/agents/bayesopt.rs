//! Bayesian optimization agents.
//!
//! - BO.1 fits one 2-D surrogate per year and advances greedily: year 1
//!   first, then a moving "frontier" year explored with a high kappa while
//!   year 1 keeps being exploited with a low kappa.
//! - BO.2 fits one 10-D surrogate from full policies to episode totals.
//! - BO.3 blends a per-year surrogate sum with a joint surrogate over the
//!   first two years, weighting them by a least-MSE fit refreshed every
//!   couple of episodes.

use serde::{Deserialize, Serialize};

use super::gp::{gp_fit, ucb_acquire, GpHyper, GpModel, Predictor, UcbParams};
use crate::action::Action;
use crate::budget::Budget;
use crate::env::{BudgetedEnv, EnvConfig, EnvironmentModel, SyntheticEnv};
use crate::error::{Error, Result};
use crate::policy::{better_of, EpisodeRecord, PartialPolicy, Policy, HORIZON};
use crate::rng::SeededRng;

/// What BO.1 plays in years beyond the current frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillerMode {
    Random,
    /// Best action observed so far for that year; random while none exists.
    Incumbent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoParams {
    /// Kernel settings for the 2-D per-year surrogates.
    pub gp: GpHyper,
    /// Lengthscale of the joint surrogates; `None` scales the 2-D one by `sqrt(dim / 2)`.
    pub joint_lengthscale: Option<f64>,
    pub kappa_explore: f64,
    pub kappa_exploit: f64,
    /// Spacing of the 2-D candidate grid.
    pub grid_resolution: f64,
    /// Uniform candidates drawn per acquisition for joint surrogates.
    pub candidates: usize,
    pub bo1_phase1_queries: usize,
    /// Directed queries the frontier year receives before the frontier moves on.
    pub bo1_frontier_queries: usize,
    pub bo1_filler: FillerMode,
    pub bo2_seed_episodes: usize,
    pub bo3_seed_episodes: usize,
    pub bo3_refit_every: usize,
    pub weight_resolution: f64,
    /// Action played in years 3-5 by BO.3.
    pub bo3_filler: Action,
}

impl Default for BoParams {
    fn default() -> Self {
        Self {
            gp: GpHyper::default(),
            joint_lengthscale: None,
            kappa_explore: 2.5,
            kappa_exploit: 0.5,
            grid_resolution: 0.05,
            candidates: 2048,
            bo1_phase1_queries: 15,
            bo1_frontier_queries: 4,
            bo1_filler: FillerMode::Random,
            bo2_seed_episodes: 5,
            bo3_seed_episodes: 2,
            bo3_refit_every: 2,
            weight_resolution: 0.02,
            bo3_filler: Action::clamped(0.5, 0.5),
        }
    }
}

impl BoParams {
    fn joint_hyper(&self, dim: usize) -> GpHyper {
        GpHyper {
            lengthscale: self
                .joint_lengthscale
                .unwrap_or(self.gp.lengthscale * (dim as f64 / 2.0).sqrt()),
            ..self.gp
        }
    }

    fn explore(&self) -> Result<UcbParams> {
        UcbParams::new(self.kappa_explore)
    }

    fn exploit(&self) -> Result<UcbParams> {
        UcbParams::new(self.kappa_exploit)
    }

    fn grid_candidates(&self) -> Result<Vec<Vec<f64>>> {
        let axis = crate::action::grid_axis(self.grid_resolution)?;
        Ok(axis
            .iter()
            .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
            .collect())
    }
}

fn random_candidates(dim: usize, n: usize, rng: &mut SeededRng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.unit()).collect())
        .collect()
}

fn to_action(x: &[f64]) -> Action {
    Action::clamped(x[0], x[1])
}

/// Observations of one year's reward as a function of that year's action.
#[derive(Debug, Clone, Default)]
struct YearData {
    points: Vec<Vec<f64>>,
    rewards: Vec<f64>,
    directed: usize,
}

impl YearData {
    fn push(&mut self, a: Action, r: f64) {
        self.points.push(a.coords().to_vec());
        self.rewards.push(r);
    }

    fn model(&self, hyper: GpHyper) -> Result<GpModel> {
        GpModel::fit_or_prior(2, &self.points, &self.rewards, hyper)
    }

    fn incumbent(&self) -> Option<(Action, f64)> {
        let mut best: Option<(Action, f64)> = None;
        for (p, r) in self.points.iter().zip(&self.rewards) {
            if best.is_none_or(|(_, b)| *r > b) {
                best = Some((to_action(p), *r));
            }
        }
        best
    }
}

/// Diagnostics from a BO.1 run.
#[derive(Debug, Clone, PartialEq)]
pub struct Bo1Trace {
    pub best: EpisodeRecord,
    /// Best year-1 action (and its reward) once phase 1 ended.
    pub year1_after_phase1: Option<(Action, f64)>,
    /// Frontier year at the start of each phase-2 episode.
    pub frontier: Vec<usize>,
}

fn filler(mode: FillerMode, data: &YearData, rng: &mut SeededRng) -> Action {
    match (mode, data.incumbent()) {
        (FillerMode::Incumbent, Some((a, _))) => a,
        _ => Action::uniform(rng),
    }
}

/// BO.1: greedy per-year Bayesian optimization.
pub fn run_bo1<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    params: &BoParams,
    rng: &mut SeededRng,
) -> Result<Bo1Trace> {
    let grid = params.grid_candidates()?;
    let mut years: Vec<YearData> = vec![YearData::default(); HORIZON];
    let mut best = None;
    let mut year1_after_phase1 = None;
    let mut frontier = 2usize;
    let mut frontier_log = Vec::new();
    let mut episode = 0usize;

    while env.budget().can_run_episode() {
        let phase1 = episode < params.bo1_phase1_queries;
        if !phase1 {
            if year1_after_phase1.is_none() {
                year1_after_phase1 = years[0].incumbent();
            }
            frontier_log.push(frontier);
        }
        env.reset()?;
        let mut played = PartialPolicy::new();
        let mut rewards = [0.0; HORIZON];
        for y in 1..=HORIZON {
            let data = &years[y - 1];
            let action = if y == 1 {
                let kappa = if phase1 { params.explore()? } else { params.exploit()? };
                let model = data.model(params.gp)?;
                to_action(&grid[ucb_acquire(&model, &grid, kappa)?])
            } else if phase1 || y > frontier {
                filler(params.bo1_filler, data, rng)
            } else if y < frontier {
                data.incumbent().map_or_else(|| Action::uniform(rng), |(a, _)| a)
            } else {
                let model = data.model(params.gp)?;
                to_action(&grid[ucb_acquire(&model, &grid, params.explore()?)?])
            };
            let r = env.step(action)?.reward;
            rewards[y - 1] = r;
            played.push(action)?;
            years[y - 1].push(action, r);
            if !phase1 && y == frontier {
                years[y - 1].directed += 1;
            }
        }
        let record = EpisodeRecord::new(played.complete()?, rewards);
        best = better_of(best, record, |r| r.total);
        if !phase1
            && frontier < HORIZON
            && years[frontier - 1].directed >= params.bo1_frontier_queries
        {
            frontier += 1;
        }
        episode += 1;
    }
    if year1_after_phase1.is_none() {
        year1_after_phase1 = years[0].incumbent();
    }
    Ok(Bo1Trace {
        best: best.ok_or(Error::BudgetExhausted)?,
        year1_after_phase1,
        frontier: frontier_log,
    })
}

/// Unbudgeted year-1-only BO: `queries` UCB queries of the year-1 surface.
/// Returns the best action and reward found.
pub fn bo1_year1_diagnostic(
    config: &EnvConfig,
    params: &BoParams,
    queries: usize,
) -> Result<(Action, f64)> {
    let grid = params.grid_candidates()?;
    let mut env = BudgetedEnv::new(SyntheticEnv::new(config.clone()), Budget::episodes(queries as u32));
    let mut data = YearData::default();
    for _ in 0..queries {
        let model = data.model(params.gp)?;
        let a = to_action(&grid[ucb_acquire(&model, &grid, params.explore()?)?]);
        env.reset()?;
        let r = env.step(a)?.reward;
        data.push(a, r);
    }
    data.incumbent().ok_or_else(|| Error::invalid("queries must be > 0"))
}

/// BO.2: one 10-D surrogate from full policies to episode totals.
pub fn run_bo2<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    params: &BoParams,
    rng: &mut SeededRng,
) -> Result<EpisodeRecord> {
    let dim = 2 * HORIZON;
    let hyper = params.joint_hyper(dim);
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut best = None;
    while env.budget().can_run_episode() {
        let policy = if xs.len() < params.bo2_seed_episodes {
            Policy::uniform(rng)
        } else {
            let model = gp_fit(&xs, &ys, hyper)?;
            let cands = random_candidates(dim, params.candidates, rng);
            Policy::from_flat(&cands[ucb_acquire(&model, &cands, params.explore()?)?])?
        };
        let record = env.evaluate_policy(&policy)?;
        xs.push(policy.flatten());
        ys.push(record.total);
        best = better_of(best, record, |r| r.total);
    }
    best.ok_or(Error::BudgetExhausted)
}

/// Blend weights of the two BO.3 surrogates and the MSE they achieve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostingWeights {
    pub w0: f64,
    pub w1: f64,
    pub mse: f64,
}

impl BoostingWeights {
    pub fn blend(&self, a: f64, b: f64) -> f64 {
        self.w0 * a + self.w1 * b
    }
}

/// Predictions of both surrogates for one observation, and its true reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendSample {
    pub pred_a: f64,
    pub pred_b: f64,
    pub truth: f64,
}

/// Exhaustive least-MSE fit of `w0 * pred_a + w1 * pred_b` over the
/// `[0,1]^2` lattice of spacing `resolution`. Ties resolve to the
/// lexicographically smallest `(w0, w1)`.
pub fn fit_boosting_weights(samples: &[BlendSample], resolution: f64) -> Result<BoostingWeights> {
    if samples.len() < 2 {
        return Err(Error::invalid("boosting weights need at least 2 observations"));
    }
    let steps = (1.0 / resolution).round();
    if !(resolution > 0.0) || steps < 1.0 || ((steps * resolution) - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("weight resolution must divide 1"));
    }
    let steps = steps as usize;
    // Canonical order makes the result independent of observation order.
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| {
        a.pred_a
            .total_cmp(&b.pred_a)
            .then(a.pred_b.total_cmp(&b.pred_b))
            .then(a.truth.total_cmp(&b.truth))
    });
    let mut best = BoostingWeights {
        w0: 0.0,
        w1: 0.0,
        mse: f64::INFINITY,
    };
    for i in 0..=steps {
        let w0 = i as f64 / steps as f64;
        for j in 0..=steps {
            let w1 = j as f64 / steps as f64;
            let w = BoostingWeights { w0, w1, mse: 0.0 };
            let mse = blend_mse(&sorted, &w);
            if mse < best.mse {
                best = BoostingWeights { w0, w1, mse };
            }
        }
    }
    Ok(best)
}

fn blend_mse(samples: &[BlendSample], w: &BoostingWeights) -> f64 {
    samples
        .iter()
        .map(|s| (w.blend(s.pred_a, s.pred_b) - s.truth).powi(2))
        .sum::<f64>()
        / samples.len() as f64
}

/// Fits weights by querying two predictors at each observed point.
pub fn fit_boosting_weights_with(
    observations: &[(Vec<f64>, f64)],
    a: &impl Predictor,
    b: &impl Predictor,
    resolution: f64,
) -> Result<BoostingWeights> {
    let samples: Vec<BlendSample> = observations
        .iter()
        .map(|(x, y)| BlendSample {
            pred_a: a.predict(x).0,
            pred_b: b.predict(x).0,
            truth: *y,
        })
        .collect();
    fit_boosting_weights(&samples, resolution)
}

/// Diagnostics from a BO.3 run.
#[derive(Debug, Clone, PartialEq)]
pub struct Bo3Trace {
    /// Best episode by the sum of its first two yearly rewards.
    pub best: EpisodeRecord,
    /// `(episode count when fitted, weights)` for every refit.
    pub weights: Vec<(usize, BoostingWeights)>,
}

impl Bo3Trace {
    /// Earliest refit episode after which every later refit moves both
    /// weights by less than `tolerance`.
    pub fn stabilized_at(&self, tolerance: f64) -> Option<usize> {
        let w = &self.weights;
        if w.is_empty() {
            return None;
        }
        let mut start = w.len() - 1;
        while start > 0 {
            let (a, b) = (w[start - 1].1, w[start].1);
            if (a.w0 - b.w0).abs() < tolerance && (a.w1 - b.w1).abs() < tolerance {
                start -= 1;
            } else {
                break;
            }
        }
        Some(w[start].0)
    }
}

/// Sum of the two per-year surrogates.
struct PerYearSum<'a> {
    year1: &'a GpModel,
    year2: &'a GpModel,
}

impl Predictor for PerYearSum<'_> {
    fn predict(&self, x: &[f64]) -> (f64, f64) {
        let (m1, s1) = self.year1.predict(&x[..2]);
        let (m2, s2) = self.year2.predict(&x[2..4]);
        (m1 + m2, (s1 * s1 + s2 * s2).sqrt())
    }
}

/// BO.3 over the first two years; years 3-5 play `params.bo3_filler`.
pub fn run_bo3<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    params: &BoParams,
    rng: &mut SeededRng,
) -> Result<Bo3Trace> {
    const YEARS: usize = 2;
    let joint_hyper = params.joint_hyper(2 * YEARS);
    let kappa = params.explore()?;
    let mut y1 = YearData::default();
    let mut y2 = YearData::default();
    let mut joint_x: Vec<Vec<f64>> = Vec::new();
    let mut joint_y: Vec<f64> = Vec::new();
    let mut samples: Vec<BlendSample> = Vec::new();
    let mut weights = BoostingWeights {
        w0: 0.5,
        w1: 0.5,
        mse: f64::NAN,
    };
    let mut trajectory = Vec::new();
    let mut best = None;
    let mut episode = 0usize;

    while env.budget().can_run_episode() {
        let (x, forward) = if episode < params.bo3_seed_episodes.max(1) {
            let x: Vec<f64> = (0..2 * YEARS).map(|_| rng.unit()).collect();
            let forward = if joint_x.is_empty() {
                None
            } else {
                let a = PerYearSum {
                    year1: &y1.model(params.gp)?,
                    year2: &y2.model(params.gp)?,
                }
                .predict(&x)
                .0;
                Some((a, gp_fit(&joint_x, &joint_y, joint_hyper)?.predict(&x).0))
            };
            (x, forward)
        } else {
            let m1 = y1.model(params.gp)?;
            let m2 = y2.model(params.gp)?;
            let per_year = PerYearSum { year1: &m1, year2: &m2 };
            let joint = gp_fit(&joint_x, &joint_y, joint_hyper)?;
            let w = weights;
            let ensemble = |c: &[f64]| {
                let (ma, sa) = per_year.predict(c);
                let (mb, sb) = joint.predict(c);
                (w.blend(ma, mb), w.blend(sa, sb))
            };
            let cands = random_candidates(2 * YEARS, params.candidates, rng);
            let x = cands[ucb_acquire(&ensemble, &cands, kappa)?].clone();
            let forward = (per_year.predict(&x).0, joint.predict(&x).0);
            (x, Some(forward))
        };

        let policy = Policy::new([
            to_action(&x[..2]),
            to_action(&x[2..4]),
            params.bo3_filler,
            params.bo3_filler,
            params.bo3_filler,
        ]);
        let record = env.evaluate_policy(&policy)?;
        let (r1, r2) = (record.yearly_rewards[0], record.yearly_rewards[1]);
        let truth = r1 + r2;
        y1.push(policy.year(1), r1);
        y2.push(policy.year(2), r2);
        joint_x.push([policy.year(1).coords(), policy.year(2).coords()].concat());
        joint_y.push(truth);
        if let Some((pred_a, pred_b)) = forward {
            samples.push(BlendSample { pred_a, pred_b, truth });
        }
        best = better_of(best, record, |r| r.sub_total(YEARS));
        episode += 1;

        if episode % params.bo3_refit_every.max(1) == 0 && samples.len() >= 2 {
            weights = fit_boosting_weights(&samples, params.weight_resolution)?;
            trajectory.push((episode, weights));
        }
    }
    Ok(Bo3Trace {
        best: best.ok_or(Error::BudgetExhausted)?,
        weights: trajectory,
    })
}
