use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::agent::Agent;
use crate::action::Action;
use crate::budget::Budget;
use crate::env::{BudgetedEnv, EnvConfig, EnvironmentModel, SyntheticEnv};
use crate::error::{Error, Result};
use crate::policy::{EpisodeRecord, HORIZON};
use crate::rng::{mix, SeededRng};

fn default_runs() -> usize {
    10
}

fn default_episodes() -> u32 {
    20
}

/// One agent on one environment over a list of seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// `env_a`, `env_b`, or a path to an environment file.
    pub env: String,
    pub agent: String,
    #[serde(default)]
    pub agent_config: serde_json::Value,
    /// Row name in comparison tables; defaults to the agent id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_episodes")]
    pub episodes: u32,
    /// One seed per run. When absent, runs use seeds `0..runs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

impl ExperimentSpec {
    pub fn new(env: &str, agent: &str, seeds: Vec<u64>) -> Self {
        Self {
            env: env.to_string(),
            agent: agent.to_string(),
            agent_config: serde_json::Value::Null,
            label: None,
            runs: seeds.len(),
            episodes: default_episodes(),
            seeds: Some(seeds),
        }
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.agent_config = config;
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad experiment spec: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.agent)
    }

    /// Applies command-line overrides. A seed override makes the seed list
    /// `seed, seed + 1, ...`; a bare run-count override truncates or extends
    /// the existing list the same way from its first seed.
    pub fn with_overrides(mut self, seed: Option<u64>, runs: Option<usize>, episodes: Option<u32>) -> Self {
        if let Some(e) = episodes {
            self.episodes = e;
        }
        if let Some(r) = runs {
            self.runs = r;
        }
        let base = seed.or_else(|| self.seeds.as_ref().and_then(|s| s.first().copied()));
        let keep = seed.is_none() && self.seeds.as_ref().is_some_and(|s| s.len() >= self.runs);
        if keep {
            if let Some(s) = self.seeds.as_mut() {
                s.truncate(self.runs);
            }
        } else if seed.is_some() || runs.is_some() {
            let base = base.unwrap_or(0);
            self.seeds = Some((0..self.runs as u64).map(|i| base.wrapping_add(i)).collect());
        }
        self
    }

    pub fn seed_list(&self) -> Result<Vec<u64>> {
        let seeds = match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.runs as u64).collect(),
        };
        if seeds.len() != self.runs {
            return Err(Error::Config(format!(
                "runs is {} but {} seeds were given",
                self.runs,
                seeds.len()
            )));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.episodes == 0 {
            return Err(Error::Config("episodes must be at least 1".into()));
        }
        Ok(seeds)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<(EnvConfig, Agent, Vec<u64>)> {
        let env = EnvConfig::resolve(&self.env)?;
        let agent = Agent::from_parts(&self.agent, &self.agent_config)?;
        Ok((env, agent, self.seed_list()?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Outcome of a single seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub best: EpisodeRecord,
    pub evaluations_used: u32,
    pub episodes_used: u32,
    /// Total reward of every completed episode, in play order.
    pub episode_totals: Vec<f64>,
}

/// Mean and sample standard deviation of per-run best totals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n.max(1) as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, runs: n }
    }

    pub fn standard_error(&self) -> f64 {
        self.std / (self.runs.max(1) as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub label: String,
    pub agent: String,
    pub env: String,
    pub episodes: u32,
    pub runs: Vec<RunResult>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn best_totals(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.best.total).collect()
    }
}

/// Records per-episode totals as the agent plays.
struct Traced<M> {
    inner: M,
    partial: f64,
    totals: Vec<f64>,
}

impl<M: EnvironmentModel> EnvironmentModel for Traced<M> {
    fn step(&mut self, year: usize, action: Action, history: &[Action]) -> Result<f64> {
        let r = self.inner.step(year, action, history)?;
        self.partial += r;
        if year == HORIZON {
            self.totals.push(self.partial);
            self.partial = 0.0;
        }
        Ok(r)
    }

    fn reset(&mut self) -> Result<()> {
        self.partial = 0.0;
        self.inner.reset()
    }
}

fn run_one(
    env: &EnvConfig,
    agent: &Agent,
    episodes: u32,
    run: usize,
    seed: u64,
) -> Result<RunResult> {
    let mut config = env.clone();
    config.set_seed(mix(env.seed(), seed));
    let model = Traced {
        inner: SyntheticEnv::new(config),
        partial: 0.0,
        totals: Vec::new(),
    };
    let mut budgeted = BudgetedEnv::new(model, Budget::episodes(episodes));
    let mut rng = SeededRng::new(seed);
    let best = agent
        .run(&mut budgeted, &mut rng)
        .map_err(|e| Error::Run {
            index: run,
            source: Box::new(e),
        })?;
    let budget = budgeted.budget();
    log::debug!("{} run {run} (seed {seed}): best {:.3}", agent.id(), best.total);
    Ok(RunResult {
        run,
        seed,
        best,
        evaluations_used: budget.used_evaluations(),
        episodes_used: budget.used_episodes(),
        episode_totals: budgeted.into_inner().totals,
    })
}

/// Runs every seed of `spec` with a fresh environment and agent.
pub fn run_experiment(spec: &ExperimentSpec, execution: Execution) -> Result<ExperimentResult> {
    let (env, agent, seeds) = spec.validate()?;
    log::info!(
        "running {} on {} for {} runs x {} episodes",
        spec.label(),
        spec.env,
        seeds.len(),
        spec.episodes
    );
    let job = |(run, &seed): (usize, &u64)| run_one(&env, &agent, spec.episodes, run, seed);
    let runs: Vec<RunResult> = match execution {
        Execution::Sequential => seeds.iter().enumerate().map(job).collect::<Result<_>>()?,
        Execution::Parallel => seeds.par_iter().enumerate().map(job).collect::<Result<_>>()?,
    };
    let totals: Vec<f64> = runs.iter().map(|r| r.best.total).collect();
    Ok(ExperimentResult {
        label: spec.label().to_string(),
        agent: agent.id().to_string(),
        env: spec.env.clone(),
        episodes: spec.episodes,
        summary: Summary::of(&totals),
        runs,
    })
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub agent: String,
    pub mean_best_reward: f64,
    pub std_best_reward: f64,
    /// `100 * mean / baseline mean`.
    pub pct_of_baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub env: String,
    pub baseline: String,
    pub rows: Vec<ComparisonRow>,
    pub results: Vec<ExperimentResult>,
}

/// Runs every spec on the shared environment and seed list and tabulates
/// them against the first random-search spec.
pub fn compare_agents(specs: &[ExperimentSpec], execution: Execution) -> Result<ComparisonTable> {
    let first = specs
        .first()
        .ok_or_else(|| Error::invalid("no experiment specs given"))?;
    let seeds = first.seed_list()?;
    for s in specs {
        if s.env != first.env {
            return Err(Error::invalid(format!(
                "specs use different environments: {} vs {}",
                first.env, s.env
            )));
        }
        if s.seed_list()? != seeds {
            return Err(Error::invalid(format!("{} uses a different seed list", s.label())));
        }
        if s.episodes != first.episodes {
            return Err(Error::invalid(format!("{} uses a different episode count", s.label())));
        }
    }
    let baseline = specs
        .iter()
        .position(|s| s.agent == "random_search")
        .ok_or_else(|| Error::invalid("a random_search spec is required as the baseline"))?;

    let results: Vec<ExperimentResult> = specs
        .iter()
        .map(|s| run_experiment(s, execution))
        .collect::<Result<_>>()?;
    let base_mean = results[baseline].summary.mean;
    let rows = results
        .iter()
        .enumerate()
        .map(|(i, r)| ComparisonRow {
            agent: r.label.clone(),
            mean_best_reward: r.summary.mean,
            std_best_reward: r.summary.std,
            pct_of_baseline: if i == baseline {
                100.0
            } else {
                100.0 * r.summary.mean / base_mean
            },
        })
        .collect();
    Ok(ComparisonTable {
        env: first.env.clone(),
        baseline: results[baseline].label.clone(),
        rows,
        results,
    })
}
