use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use scarce_rl_core::env::EnvFile;
use scarce_rl_core::{EnvConfig, Error, Result};
use serde::{Deserialize, Serialize};

/// What a step does when another step on the same session is in flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepContention {
    /// Wait for the earlier step to finish.
    #[default]
    Queue,
    /// Answer 503 `session_busy` with `Retry-After`.
    Reject,
}

/// Registered environments and session policy.
#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub envs: BTreeMap<String, EnvConfig>,
    pub idle_timeout: Duration,
    pub contention: StepContention,
}

impl Default for ServiceConfig {
    /// `env_a` and `env_b`, one hour idle expiry, queued steps.
    fn default() -> Self {
        let envs = ["env_a", "env_b"]
            .into_iter()
            .map(|id| (id.to_string(), EnvConfig::builtin(id).expect("builtin env")))
            .collect();
        Self {
            envs,
            idle_timeout: Duration::from_secs(3600),
            contention: StepContention::Queue,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EnvSource {
    /// A builtin name or a path relative to the config file.
    Named(String),
    Inline(Box<EnvFile>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceFile {
    envs: BTreeMap<String, EnvSource>,
    #[serde(default)]
    idle_timeout_secs: Option<u64>,
    #[serde(default)]
    contention: Option<StepContention>,
}

impl ServiceConfig {
    /// Reads an `envs.json` such as
    /// `{"envs": {"env_a": "env_a", "mine": "configs/mine.json"}, "idle_timeout_secs": 600}`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// `base` anchors relative environment paths.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let file: ServiceFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad service config: {e}")))?;
        if file.envs.is_empty() {
            return Err(Error::Config("service config registers no environments".into()));
        }
        let mut envs = BTreeMap::new();
        for (id, source) in file.envs {
            let config = match source {
                EnvSource::Named(name) => match EnvConfig::builtin(&name) {
                    Some(c) => c,
                    None => EnvConfig::load(base.join(&name))?,
                },
                EnvSource::Inline(f) => EnvConfig::from_file(*f)?,
            };
            envs.insert(id, config);
        }
        let defaults = Self::default();
        let idle_timeout = match file.idle_timeout_secs {
            Some(0) => return Err(Error::Config("idle_timeout_secs must be positive".into())),
            Some(s) => Duration::from_secs(s),
            None => defaults.idle_timeout,
        };
        Ok(Self {
            envs,
            idle_timeout,
            contention: file.contention.unwrap_or_default(),
        })
    }
}
