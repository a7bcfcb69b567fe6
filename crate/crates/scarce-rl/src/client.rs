//! Blocking client for the evaluation [service](crate::service).
//!
//! [`RemoteEnv`] implements [`EnvironmentModel`], so wrapping it in a
//! [`BudgetedEnv`] lets every agent run unmodified against a server.
//! The local wrapper charges budget only after the server answers, so a
//! transport failure consumes nothing locally.

use std::time::Duration;

use reqwest::blocking::{Client, Response};
use reqwest::StatusCode;
use scarce_rl_core::harness::Agent;
use scarce_rl_core::{Action, Budget, BudgetedEnv, EnvironmentModel, EpisodeRecord, Error, Result, SeededRng};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::service::wire::{
    codes, CreateRequest, CreateResponse, ErrorBody, Remaining, ResetResponse, SessionInfo, StepRequest,
    StepResponse,
};

/// One session on a remote service.
#[derive(Debug, Clone)]
pub struct RemoteEnv {
    http: Client,
    base_url: String,
    token: String,
    env_id: String,
}

fn transport(e: reqwest::Error) -> Error {
    Error::Transport(e.to_string())
}

fn decode<T: DeserializeOwned>(resp: Response) -> Result<T> {
    let status = resp.status();
    let bytes = resp.bytes().map_err(transport)?;
    if status.is_success() {
        return serde_json::from_slice(&bytes)
            .map_err(|e| Error::Remote(format!("malformed response: {e}")));
    }
    let body: Option<ErrorBody> = serde_json::from_slice(&bytes).ok();
    let code = body.as_ref().map(|b| b.error.as_str()).unwrap_or("");
    let detail = body
        .as_ref()
        .and_then(|b| b.detail.clone())
        .unwrap_or_else(|| String::from_utf8_lossy(&bytes).into_owned());
    Err(match code {
        codes::BUDGET_EXHAUSTED => Error::BudgetExhausted,
        codes::EPISODE_DONE => Error::EpisodeDone,
        codes::INVALID_ACTION => Error::InvalidArgument(detail),
        codes::UNKNOWN_ENV => Error::Config(format!("server has no such environment: {detail}")),
        codes::SESSION_BUSY => Error::Transport("session busy, retry".into()),
        _ if status == StatusCode::SERVICE_UNAVAILABLE => Error::Transport(format!("{status}: {detail}")),
        _ => Error::Remote(format!("{status} {code}: {detail}")),
    })
}

impl RemoteEnv {
    /// Opens a fresh session on `env_id`. A `seed` derives the session's
    /// environment the same way a harness run with that seed does.
    pub fn create(base_url: &str, env_id: &str, seed: Option<u64>) -> Result<Self> {
        let http = Client::builder()
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(transport)?;
        let base_url = base_url.trim_end_matches('/').to_string();
        let req = CreateRequest { env: env_id.to_string(), seed };
        let resp = http
            .post(format!("{base_url}/sessions"))
            .json(&req)
            .send()
            .map_err(transport)?;
        let created: CreateResponse = decode(resp)?;
        log::debug!("opened session on {env_id} at {base_url}");
        Ok(Self { http, base_url, token: created.token, env_id: created.env })
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn env_id(&self) -> &str {
        &self.env_id
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: Option<&B>) -> Result<T> {
        let mut req = self.http.post(format!("{}/sessions/{}/{path}", self.base_url, self.token));
        if let Some(b) = body {
            req = req.json(b);
        }
        decode(req.send().map_err(transport)?)
    }

    pub fn info(&self) -> Result<SessionInfo> {
        let resp = self
            .http
            .get(format!("{}/sessions/{}", self.base_url, self.token))
            .send()
            .map_err(transport)?;
        decode(resp)
    }

    pub fn remaining(&self) -> Result<Remaining> {
        Ok(self.info()?.remaining)
    }

    /// Plays one step without any local bookkeeping.
    pub fn step_action(&self, action: Action) -> Result<StepResponse> {
        self.post("step", Some(&StepRequest { action }))
    }

    pub fn reset_session(&self) -> Result<ResetResponse> {
        self.post::<(), _>("reset", None)
    }
}

impl EnvironmentModel for RemoteEnv {
    fn step(&mut self, year: usize, action: Action, _history: &[Action]) -> Result<f64> {
        let out = self.step_action(action)?;
        if out.year != year {
            return Err(Error::Remote(format!(
                "server played year {} where year {year} was expected",
                out.year
            )));
        }
        Ok(out.reward)
    }

    fn reset(&mut self) -> Result<()> {
        self.reset_session().map(|_| ())
    }
}

/// Runs `agent` against a fresh session, seeding both the session and the
/// agent with `seed` exactly as a local harness run would.
pub fn run_agent_remote(base_url: &str, env_id: &str, agent: &Agent, seed: u64) -> Result<(EpisodeRecord, Budget)> {
    let remote = RemoteEnv::create(base_url, env_id, Some(seed))?;
    let mut env = BudgetedEnv::with_default_budget(remote);
    let best = agent.run(&mut env, &mut SeededRng::new(seed))?;
    Ok((best, env.budget()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unreachable_server_is_retryable() {
        // Port 1 on loopback is essentially never listening.
        let err = RemoteEnv::create("http://127.0.0.1:1", "env_a", None).unwrap_err();
        assert!(err.is_retryable(), "{err}");
    }
}
