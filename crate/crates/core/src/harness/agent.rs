//! Agent selection by id plus a JSON config blob.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::agents::{
    run_bo1, run_bo2, run_bo3, run_full_sequence_break, run_ga, run_plain_qlearning,
    run_qlearning_seq_break, run_random_search_scored, BoParams, EpsilonSchedule, GaConfig,
    GridBreakConfig, QConfig,
};
use crate::env::{BudgetedEnv, EnvironmentModel};
use crate::error::{Error, Result};
use crate::policy::{EpisodeRecord, HORIZON};
use crate::rng::SeededRng;

pub const AGENT_IDS: [&str; 8] = [
    "random_search",
    "ga",
    "full_sequence_break",
    "bo1",
    "bo2",
    "bo3",
    "plain_q",
    "qlearning_seq_break",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomSearchConfig {
    /// Leading years whose rewards rank candidate policies.
    pub scored_years: usize,
}

impl Default for RandomSearchConfig {
    fn default() -> Self {
        Self {
            scored_years: HORIZON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlainQConfig {
    pub gamma: f64,
    pub epsilon0: f64,
    /// When set, epsilon falls linearly to this value over the run instead
    /// of following the stretched 16-episode rule.
    pub epsilon_final: Option<f64>,
}

impl Default for PlainQConfig {
    fn default() -> Self {
        Self {
            gamma: 0.9,
            epsilon0: 0.8,
            epsilon_final: None,
        }
    }
}

impl PlainQConfig {
    fn schedule(&self, episodes: usize) -> EpsilonSchedule {
        match self.epsilon_final {
            Some(end) => EpsilonSchedule::Linear {
                start: self.epsilon0,
                end,
                episodes,
            },
            None => EpsilonSchedule::Stretched {
                start: self.epsilon0,
                episodes,
            },
        }
    }
}

/// A configured agent.
#[derive(Debug, Clone, PartialEq)]
pub enum Agent {
    RandomSearch(RandomSearchConfig),
    Ga(GaConfig),
    FullSequenceBreak(GridBreakConfig),
    Bo1(BoParams),
    Bo2(BoParams),
    Bo3(BoParams),
    PlainQ(PlainQConfig),
    QSeqBreak(QConfig),
}

fn parse<T: DeserializeOwned + Default>(config: &serde_json::Value) -> Result<T> {
    if config.is_null() {
        return Ok(T::default());
    }
    T::deserialize(config).map_err(|e| Error::Config(format!("bad agent_config: {e}")))
}

impl Agent {
    /// Builds an agent from its id and an optional (null) config object.
    pub fn from_parts(id: &str, config: &serde_json::Value) -> Result<Self> {
        let agent = match id {
            "random_search" => Self::RandomSearch(parse(config)?),
            "ga" => Self::Ga(parse(config)?),
            "full_sequence_break" => Self::FullSequenceBreak(parse(config)?),
            "bo1" => Self::Bo1(parse(config)?),
            "bo2" => Self::Bo2(parse(config)?),
            "bo3" => Self::Bo3(parse(config)?),
            "plain_q" => Self::PlainQ(parse(config)?),
            "qlearning_seq_break" => Self::QSeqBreak(parse(config)?),
            other => {
                return Err(Error::Config(format!(
                    "unknown agent `{other}` (expected one of {})",
                    AGENT_IDS.join(", ")
                )))
            }
        };
        agent.validate()?;
        Ok(agent)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::RandomSearch(_) => "random_search",
            Self::Ga(_) => "ga",
            Self::FullSequenceBreak(_) => "full_sequence_break",
            Self::Bo1(_) => "bo1",
            Self::Bo2(_) => "bo2",
            Self::Bo3(_) => "bo3",
            Self::PlainQ(_) => "plain_q",
            Self::QSeqBreak(_) => "qlearning_seq_break",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |e: Error| Error::Config(e.to_string());
        match self {
            Self::RandomSearch(c) if !(1..=HORIZON).contains(&c.scored_years) => {
                Err(Error::Config(format!("scored_years must lie in 1..={HORIZON}")))
            }
            Self::Ga(c) => c.validate().map_err(bad),
            Self::QSeqBreak(c) => c.validate().map_err(bad),
            Self::PlainQ(c) => QConfig {
                gamma: c.gamma,
                epsilon0: c.epsilon0,
                ..QConfig::default()
            }
            .validate()
            .map_err(bad),
            _ => Ok(()),
        }
    }

    /// Runs the agent until its budget is spent and returns its best episode.
    pub fn run<M: EnvironmentModel>(
        &self,
        env: &mut BudgetedEnv<M>,
        rng: &mut SeededRng,
    ) -> Result<EpisodeRecord> {
        match self {
            Self::RandomSearch(c) => run_random_search_scored(env, rng, c.scored_years),
            Self::Ga(c) => run_ga(env, c, rng),
            Self::FullSequenceBreak(c) => run_full_sequence_break(env, c, rng),
            Self::Bo1(p) => Ok(run_bo1(env, p, rng)?.best),
            Self::Bo2(p) => run_bo2(env, p, rng),
            Self::Bo3(p) => Ok(run_bo3(env, p, rng)?.best),
            Self::PlainQ(c) => {
                let episodes = env.budget().remaining_episodes() as usize;
                let q = QConfig {
                    gamma: c.gamma,
                    epsilon0: c.epsilon0,
                    ..QConfig::default()
                };
                Ok(run_plain_qlearning(env, &q, c.schedule(episodes), episodes, rng)?.0)
            }
            Self::QSeqBreak(c) => Ok(run_qlearning_seq_break(env, c, rng)?.best),
        }
    }
}
