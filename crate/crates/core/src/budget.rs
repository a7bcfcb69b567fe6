use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::HORIZON;

pub const DEFAULT_MAX_EPISODES: u32 = 20;
pub const DEFAULT_MAX_EVALUATIONS: u32 = DEFAULT_MAX_EPISODES * HORIZON as u32;

/// Remaining step evaluations and episodes.
///
/// An episode is charged when its final year is stepped, or when it is
/// abandoned mid-way by a reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    max_evaluations: u32,
    used_evaluations: u32,
    max_episodes: u32,
    used_episodes: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_EVALUATIONS, DEFAULT_MAX_EPISODES)
    }
}

impl Budget {
    pub fn new(max_evaluations: u32, max_episodes: u32) -> Self {
        Self {
            max_evaluations,
            used_evaluations: 0,
            max_episodes,
            used_episodes: 0,
        }
    }

    /// A budget sized for exactly `episodes` full episodes.
    pub fn episodes(episodes: u32) -> Self {
        Self::new(episodes * HORIZON as u32, episodes)
    }

    pub fn max_evaluations(&self) -> u32 {
        self.max_evaluations
    }

    pub fn used_evaluations(&self) -> u32 {
        self.used_evaluations
    }

    pub fn max_episodes(&self) -> u32 {
        self.max_episodes
    }

    pub fn used_episodes(&self) -> u32 {
        self.used_episodes
    }

    pub fn remaining_evaluations(&self) -> u32 {
        self.max_evaluations - self.used_evaluations
    }

    pub fn remaining_episodes(&self) -> u32 {
        self.max_episodes - self.used_episodes
    }

    /// Whether a whole fresh episode still fits.
    pub fn can_run_episode(&self) -> bool {
        self.remaining_episodes() >= 1 && self.remaining_evaluations() >= HORIZON as u32
    }

    pub(crate) fn charge_evaluation(&mut self) -> Result<()> {
        if self.used_evaluations >= self.max_evaluations {
            return Err(Error::BudgetExhausted);
        }
        self.used_evaluations += 1;
        Ok(())
    }

    pub(crate) fn charge_episode(&mut self) -> Result<()> {
        if self.used_episodes >= self.max_episodes {
            return Err(Error::BudgetExhausted);
        }
        self.used_episodes += 1;
        Ok(())
    }
}
