use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::action::Action;
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Number of simulated years in an episode.
pub const HORIZON: usize = 5;

/// A full 5-year plan, serialized as `[[itn, irs], ...]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    actions: [Action; HORIZON],
}

impl Policy {
    pub fn new(actions: [Action; HORIZON]) -> Self {
        Self { actions }
    }

    pub fn from_slice(actions: &[Action]) -> Result<Self> {
        let actions: [Action; HORIZON] = actions.try_into().map_err(|_| {
            Error::invalid(format!(
                "policy needs exactly {HORIZON} actions, got {}",
                actions.len()
            ))
        })?;
        Ok(Self { actions })
    }

    /// The same action in every year.
    pub fn constant(action: Action) -> Self {
        Self {
            actions: [action; HORIZON],
        }
    }

    pub fn uniform(rng: &mut SeededRng) -> Self {
        Self {
            actions: std::array::from_fn(|_| Action::uniform(rng)),
        }
    }

    pub fn actions(&self) -> &[Action; HORIZON] {
        &self.actions
    }

    /// Action for `year` (1-based).
    pub fn year(&self, year: usize) -> Action {
        self.actions[year - 1]
    }

    pub fn with_year(mut self, year: usize, action: Action) -> Self {
        self.actions[year - 1] = action;
        self
    }

    /// Flattened `[itn1, irs1, itn2, ...]`, the 10-D view used by joint surrogates.
    pub fn flatten(&self) -> Vec<f64> {
        self.actions.iter().flat_map(|a| a.coords()).collect()
    }

    pub fn from_flat(x: &[f64]) -> Result<Self> {
        if x.len() != 2 * HORIZON {
            return Err(Error::invalid(format!(
                "flat policy needs {} coordinates, got {}",
                2 * HORIZON,
                x.len()
            )));
        }
        Ok(Self {
            actions: std::array::from_fn(|i| Action::clamped(x[2 * i], x[2 * i + 1])),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("policy serialization is infallible")
    }
}

impl Serialize for Policy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.actions.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Policy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Action>::deserialize(d)?;
        Policy::from_slice(&v).map_err(D::Error::custom)
    }
}

/// The first 1..4 years of a policy while an agent is still choosing actions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialPolicy {
    actions: Vec<Action>,
}

impl PartialPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, action: Action) -> Result<()> {
        if self.actions.len() == HORIZON {
            return Err(Error::invalid("partial policy already has 5 actions"));
        }
        self.actions.push(action);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn complete(self) -> Result<Policy> {
        Policy::from_slice(&self.actions)
    }
}

/// Outcome of one simulated episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub policy: Policy,
    pub yearly_rewards: [f64; HORIZON],
    pub total: f64,
}

impl EpisodeRecord {
    pub fn new(policy: Policy, yearly_rewards: [f64; HORIZON]) -> Self {
        Self {
            policy,
            yearly_rewards,
            total: sum_rewards(&yearly_rewards),
        }
    }

    /// Sum of the first `years` yearly rewards.
    pub fn sub_total(&self, years: usize) -> f64 {
        sum_rewards(&self.yearly_rewards[..years.min(HORIZON)])
    }
}

/// Left-to-right sum, the one summation order used for episode totals.
pub fn sum_rewards(rewards: &[f64]) -> f64 {
    rewards.iter().fold(0.0, |acc, r| acc + r)
}

/// Returns the record with the larger `score`; earlier record wins ties.
pub(crate) fn better_of(
    best: Option<EpisodeRecord>,
    candidate: EpisodeRecord,
    score: impl Fn(&EpisodeRecord) -> f64,
) -> Option<EpisodeRecord> {
    match best {
        Some(b) if score(&b) >= score(&candidate) => Some(b),
        _ => Some(candidate),
    }
}
