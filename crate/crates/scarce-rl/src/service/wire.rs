//! JSON bodies exchanged between the service and its clients.

use scarce_rl_core::{Action, Budget};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Remaining {
    pub evaluations: u32,
    pub episodes: u32,
}

impl From<Budget> for Remaining {
    fn from(b: Budget) -> Self {
        Self {
            evaluations: b.remaining_evaluations(),
            episodes: b.remaining_episodes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub env: String,
    /// Derives the session's noise stream the same way the experiment
    /// harness does for a run seed. Omitted: the config's own seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateResponse {
    pub token: String,
    pub env: String,
    pub remaining: Remaining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRequest {
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResponse {
    pub reward: f64,
    /// The year that was just played.
    pub year: usize,
    pub done: bool,
    pub remaining: Remaining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResetResponse {
    pub year: usize,
    pub remaining: Remaining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub token: String,
    pub env: String,
    /// Year the next step will play.
    pub year: usize,
    pub done: bool,
    pub remaining: Remaining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Stable error codes carried in [`ErrorBody::error`].
pub mod codes {
    pub const UNKNOWN_ENV: &str = "unknown_env";
    pub const UNKNOWN_SESSION: &str = "unknown_session";
    pub const BUDGET_EXHAUSTED: &str = "budget_exhausted";
    pub const EPISODE_DONE: &str = "episode_done";
    pub const INVALID_ACTION: &str = "invalid_action";
    pub const BAD_REQUEST: &str = "bad_request";
    pub const SESSION_BUSY: &str = "session_busy";
    pub const INTERNAL: &str = "internal";
}
