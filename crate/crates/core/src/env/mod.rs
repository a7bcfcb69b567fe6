//! Environments agents are evaluated against.
//!
//! [`EnvironmentModel`] answers one yearly reward query at a time;
//! [`BudgetedEnv`] wraps a model with the 5-year horizon and the
//! evaluation/episode budget every agent must respect.

mod config;
mod synthetic;

pub use config::{EnvConfig, EnvFile, EnvModelKind};
pub use synthetic::{
    default_env_a, default_env_b, scan_axis, year_reward_a, year_reward_b, EnvConfigA,
    EnvConfigB, GaussianBump, SyntheticEnv, YearSurface, DEFAULT_SCAN_N, ENV_A_JSON, ENV_B_JSON,
};

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::policy::{EpisodeRecord, Policy, HORIZON};

/// Yearly reward oracle.
///
/// `history` holds the actions already played this episode, so
/// `history.len() == year - 1`.
pub trait EnvironmentModel {
    fn step(&mut self, year: usize, action: Action, history: &[Action]) -> Result<f64>;

    /// Called at the start of every episode.
    fn reset(&mut self) -> Result<()> {
        Ok(())
    }
}

impl<M: EnvironmentModel + ?Sized> EnvironmentModel for Box<M> {
    fn step(&mut self, year: usize, action: Action, history: &[Action]) -> Result<f64> {
        (**self).step(year, action, history)
    }

    fn reset(&mut self) -> Result<()> {
        (**self).reset()
    }
}

/// Result of a single budgeted step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub reward: f64,
    /// Year to be played next, `None` once the episode is done.
    pub next_year: Option<usize>,
    pub remaining: Budget,
}

impl StepOutcome {
    pub fn done(&self) -> bool {
        self.next_year.is_none()
    }
}

/// An environment model metered by a [`Budget`].
#[derive(Debug, Clone)]
pub struct BudgetedEnv<M> {
    inner: M,
    budget: Budget,
    year: usize,
    done: bool,
    history: Vec<Action>,
}

impl<M: EnvironmentModel> BudgetedEnv<M> {
    pub fn new(inner: M, budget: Budget) -> Self {
        Self {
            inner,
            budget,
            year: 1,
            done: false,
            history: Vec::with_capacity(HORIZON),
        }
    }

    /// The standard 100-evaluation / 20-episode budget.
    pub fn with_default_budget(inner: M) -> Self {
        Self::new(inner, Budget::default())
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Year the next step will play.
    pub fn year(&self) -> usize {
        self.year
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn history(&self) -> &[Action] {
        &self.history
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut M {
        &mut self.inner
    }

    pub fn into_inner(self) -> M {
        self.inner
    }

    /// Plays `action` for the current year.
    ///
    /// Budget is charged only after the model answers, so a failing model
    /// (for example an unreachable server) consumes nothing.
    pub fn step(&mut self, action: Action) -> Result<StepOutcome> {
        if self.budget.remaining_evaluations() == 0 {
            return Err(Error::BudgetExhausted);
        }
        if self.done {
            return Err(Error::EpisodeDone);
        }
        if self.history.is_empty() && self.budget.remaining_episodes() == 0 {
            return Err(Error::BudgetExhausted);
        }
        let reward = self.inner.step(self.year, action, &self.history)?;
        self.budget.charge_evaluation()?;
        self.history.push(action);
        let next_year = if self.year == HORIZON {
            self.budget.charge_episode()?;
            self.done = true;
            None
        } else {
            self.year += 1;
            Some(self.year)
        };
        Ok(StepOutcome {
            reward,
            next_year,
            remaining: self.budget,
        })
    }

    /// Starts a new episode. Abandoning an episode mid-way forfeits it.
    pub fn reset(&mut self) -> Result<()> {
        self.inner.reset()?;
        if !self.history.is_empty() && !self.done {
            self.budget.charge_episode()?;
        }
        self.history.clear();
        self.year = 1;
        self.done = false;
        Ok(())
    }

    /// Runs one full episode of `policy`: exactly 5 evaluations, 1 episode.
    pub fn evaluate_policy(&mut self, policy: &Policy) -> Result<EpisodeRecord> {
        if !self.budget.can_run_episode() {
            return Err(Error::BudgetExhausted);
        }
        self.reset()?;
        let mut rewards = [0.0; HORIZON];
        for (slot, action) in rewards.iter_mut().zip(policy.actions()) {
            *slot = self.step(*action)?.reward;
        }
        Ok(EpisodeRecord::new(*policy, rewards))
    }
}
