//! Environment config file format.
//!
//! ```json
//! {"model": "carryover",
//!  "years": [{"bumps": [{"center": [0.2, 0.55], "amplitude": 110, "width": 0.15}]}, ...],
//!  "carryover_strength": 0.5, "carryover_width": 0.5,
//!  "noise_std": 0.0, "seed": 0, "year_max": 110}
//! ```
//!
//! `model` may be omitted: a file with `history_weight` and no carryover
//! fields is the history model, anything else the carryover model.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::synthetic::{default_env_a, default_env_b, EnvConfigA, EnvConfigB, YearSurface};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvModelKind {
    Carryover,
    History,
}

/// Raw on-disk shape shared by both models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<EnvModelKind>,
    pub years: Vec<YearSurface>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carryover_strength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carryover_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub history_weight: Option<f64>,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year_max: Option<f64>,
}

/// A validated environment configuration of either model.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvConfig {
    A(EnvConfigA),
    B(EnvConfigB),
}

impl From<EnvConfigA> for EnvConfig {
    fn from(c: EnvConfigA) -> Self {
        EnvConfig::A(c)
    }
}

impl From<EnvConfigB> for EnvConfig {
    fn from(c: EnvConfigB) -> Self {
        EnvConfig::B(c)
    }
}

impl EnvConfig {
    /// `env_a` / `env_b`, the shipped defaults.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "env_a" => Some(default_env_a().into()),
            "env_b" => Some(default_env_b().into()),
            _ => None,
        }
    }

    /// A builtin name, or otherwise a path to a config file.
    pub fn resolve(id: &str) -> Result<Self> {
        match Self::builtin(id) {
            Some(c) => Ok(c),
            None => Self::load(id),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnvFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad environment config: {e}")))?;
        Self::from_file(file)
    }

    pub fn from_file(f: EnvFile) -> Result<Self> {
        let has_carry = f.carryover_strength.is_some() || f.carryover_width.is_some();
        let kind = match f.model {
            Some(k) => k,
            None if f.history_weight.is_some() && !has_carry => EnvModelKind::History,
            None => EnvModelKind::Carryover,
        };
        let config = match kind {
            EnvModelKind::Carryover => {
                if f.history_weight.is_some() {
                    return Err(Error::Config(
                        "history_weight is not a carryover-model field".into(),
                    ));
                }
                EnvConfig::A(EnvConfigA {
                    years: f.years,
                    carryover_strength: f.carryover_strength.unwrap_or(0.0),
                    carryover_width: f.carryover_width.unwrap_or(1.0),
                    noise_std: f.noise_std,
                    seed: f.seed,
                    year_max: f.year_max,
                })
            }
            EnvModelKind::History => {
                if has_carry {
                    return Err(Error::Config(
                        "carryover fields are not history-model fields".into(),
                    ));
                }
                EnvConfig::B(EnvConfigB {
                    years: f.years,
                    history_weight: f.history_weight.unwrap_or(0.0),
                    noise_std: f.noise_std,
                    seed: f.seed,
                    year_max: f.year_max,
                })
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_file(&self) -> EnvFile {
        match self {
            EnvConfig::A(c) => EnvFile {
                model: Some(EnvModelKind::Carryover),
                years: c.years.clone(),
                carryover_strength: Some(c.carryover_strength),
                carryover_width: Some(c.carryover_width),
                history_weight: None,
                noise_std: c.noise_std,
                seed: c.seed,
                year_max: c.year_max,
            },
            EnvConfig::B(c) => EnvFile {
                model: Some(EnvModelKind::History),
                years: c.years.clone(),
                carryover_strength: None,
                carryover_width: None,
                history_weight: Some(c.history_weight),
                noise_std: c.noise_std,
                seed: c.seed,
                year_max: c.year_max,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("config serialization is infallible")
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EnvConfig::A(c) => c.validate(),
            EnvConfig::B(c) => c.validate(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            EnvConfig::A(c) => c.seed,
            EnvConfig::B(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            EnvConfig::A(c) => c.seed = seed,
            EnvConfig::B(c) => c.seed = seed,
        }
    }

    pub fn noise_std(&self) -> f64 {
        match self {
            EnvConfig::A(c) => c.noise_std,
            EnvConfig::B(c) => c.noise_std,
        }
    }

    pub fn years(&self) -> &[YearSurface] {
        match self {
            EnvConfig::A(c) => &c.years,
            EnvConfig::B(c) => &c.years,
        }
    }

    pub fn kind(&self) -> EnvModelKind {
        match self {
            EnvConfig::A(_) => EnvModelKind::Carryover,
            EnvConfig::B(_) => EnvModelKind::History,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_roundtrip_through_file_format() {
        for name in ["env_a", "env_b"] {
            let c = EnvConfig::builtin(name).unwrap();
            let back = EnvConfig::from_json(&c.to_json()).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn model_inferred_from_fields() {
        let b = r#"{"years":[{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]}],
                    "history_weight":0.3}"#;
        assert_eq!(EnvConfig::from_json(b).unwrap().kind(), EnvModelKind::History);
        let a = r#"{"years":[{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]}],
                    "carryover_strength":0.3, "carryover_width": 0.4}"#;
        assert_eq!(EnvConfig::from_json(a).unwrap().kind(), EnvModelKind::Carryover);
    }

    #[test]
    fn mixed_model_fields_rejected() {
        let bad = r#"{"model":"history","years":[{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]},{"bumps":[]}],
                      "history_weight":0.3, "carryover_strength": 0.2}"#;
        assert!(EnvConfig::from_json(bad).is_err());
    }

    #[test]
    fn unknown_builtin_falls_back_to_path() {
        assert!(matches!(
            EnvConfig::resolve("/definitely/not/here.json"),
            Err(Error::Config(_))
        ));
    }
}
