//! Synthetic reward surfaces built from Gaussian bumps.

use serde::{Deserialize, Serialize};

use super::{EnvConfig, EnvironmentModel};
use crate::action::Action;
use crate::error::{Error, Result};
use crate::policy::HORIZON;
use crate::rng::SeededRng;

/// Canonical carryover environment, shipped as a versioned file.
pub const ENV_A_JSON: &str = include_str!("../../configs/env_a.json");
/// Canonical history environment, shipped as a versioned file.
pub const ENV_B_JSON: &str = include_str!("../../configs/env_b.json");

/// Grid size of the construction-time maximum check and the default landscape.
pub const DEFAULT_SCAN_N: usize = 40;

/// Relative tolerance of the construction-time maximum check.
const YEAR_MAX_TOLERANCE: f64 = 0.05;

/// `amplitude * exp(-|a - center|^2 / (2 width^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: Action,
    pub amplitude: f64,
    pub width: f64,
}

impl GaussianBump {
    pub fn value(&self, a: Action) -> f64 {
        let d2 = a.squared_distance(self.center);
        self.amplitude * (-d2 / (2.0 * self.width * self.width)).exp()
    }
}

/// One year's noise-free base surface: a sum of bumps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct YearSurface {
    pub bumps: Vec<GaussianBump>,
}

impl YearSurface {
    pub fn single(center: Action, amplitude: f64, width: f64) -> Self {
        Self {
            bumps: vec![GaussianBump {
                center,
                amplitude,
                width,
            }],
        }
    }

    pub fn value(&self, a: Action) -> f64 {
        self.bumps.iter().map(|b| b.value(a)).sum()
    }

    /// Maximum over an `n x n` scan of the unit square.
    pub fn scan_max(&self, n: usize) -> f64 {
        let axis = scan_axis(n);
        axis.iter()
            .flat_map(|&x| axis.iter().map(move |&y| Action::clamped(x, y)))
            .map(|a| self.value(a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn validate(&self) -> Result<()> {
        for b in &self.bumps {
            if !(b.width > 0.0) || !b.amplitude.is_finite() {
                return Err(Error::Config(format!(
                    "bump at {} needs width > 0 and finite amplitude",
                    b.center
                )));
            }
        }
        Ok(())
    }
}

/// Scan coordinates `i / (n - 1)`, covering both edges of `[0, 1]`.
pub fn scan_axis(n: usize) -> Vec<f64> {
    assert!(n >= 2, "scan needs at least 2 points per axis");
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Carryover model: year `i` depends on its own action and the one before.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfigA {
    pub years: Vec<YearSurface>,
    pub carryover_strength: f64,
    pub carryover_width: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub year_max: Option<f64>,
}

/// History model: year `i` depends on its action and the mean of all earlier ones.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfigB {
    pub years: Vec<YearSurface>,
    pub history_weight: f64,
    pub noise_std: f64,
    pub seed: u64,
    pub year_max: Option<f64>,
}

impl EnvConfigA {
    /// Same surface in every year, no carryover, no noise.
    pub fn separable(surface: YearSurface) -> Self {
        Self {
            years: vec![surface; HORIZON],
            carryover_strength: 0.0,
            carryover_width: 1.0,
            noise_std: 0.0,
            seed: 0,
            year_max: None,
        }
    }

    /// All-zero surfaces.
    pub fn null() -> Self {
        Self::separable(YearSurface::default())
    }

    pub fn validate(&self) -> Result<()> {
        validate_years(&self.years, self.year_max)?;
        unit_interval("carryover_strength", self.carryover_strength)?;
        positive("carryover_width", self.carryover_width)?;
        non_negative("noise_std", self.noise_std)
    }

    fn carry(&self, action: Action, prev: Action) -> f64 {
        let d2 = action.squared_distance(prev);
        let w = self.carryover_width;
        (1.0 - self.carryover_strength)
            + self.carryover_strength * (-d2 / (2.0 * w * w)).exp()
    }
}

impl EnvConfigB {
    pub fn validate(&self) -> Result<()> {
        validate_years(&self.years, self.year_max)?;
        unit_interval("history_weight", self.history_weight)?;
        non_negative("noise_std", self.noise_std)
    }

    fn effective_action(&self, action: Action, history: &[Action]) -> Action {
        if history.is_empty() {
            return action;
        }
        let n = history.len() as f64;
        let mean_itn = history.iter().map(|a| a.itn()).sum::<f64>() / n;
        let mean_irs = history.iter().map(|a| a.irs()).sum::<f64>() / n;
        let w = self.history_weight;
        Action::clamped(
            (1.0 - w) * action.itn() + w * mean_itn,
            (1.0 - w) * action.irs() + w * mean_irs,
        )
    }
}

fn validate_years(years: &[YearSurface], year_max: Option<f64>) -> Result<()> {
    if years.len() != HORIZON {
        return Err(Error::Config(format!(
            "expected {HORIZON} yearly surfaces, got {}",
            years.len()
        )));
    }
    for (i, y) in years.iter().enumerate() {
        y.validate()?;
        if let Some(target) = year_max {
            let max = y.scan_max(DEFAULT_SCAN_N);
            if (max - target).abs() > YEAR_MAX_TOLERANCE * target.abs() {
                return Err(Error::Config(format!(
                    "year {} surface maximum {max:.3} is not within 5% of {target}",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

fn unit_interval(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be in [0,1], got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be >= 0, got {v}")))
    }
}

fn check_year(year: usize) -> Result<()> {
    if (1..=HORIZON).contains(&year) {
        Ok(())
    } else {
        Err(Error::invalid(format!("year {year} outside 1..={HORIZON}")))
    }
}

fn noise(std: f64, rng: &mut SeededRng) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    use rand_distr::{Distribution, Normal};
    Normal::new(0.0, std)
        .expect("noise_std validated non-negative")
        .sample(rng)
}

/// Carryover-model reward: `base(a) * carry(prev, a) + noise`.
pub fn year_reward_a(
    year: usize,
    action: Action,
    prev_action: Option<Action>,
    config: &EnvConfigA,
    rng: &mut SeededRng,
) -> Result<f64> {
    check_year(year)?;
    if prev_action.is_some() != (year > 1) {
        return Err(Error::invalid(
            "previous action must be given exactly when year > 1",
        ));
    }
    let base = config.years[year - 1].value(action);
    let carry = prev_action.map_or(1.0, |p| config.carry(action, p));
    Ok(base * carry + noise(config.noise_std, rng))
}

/// History-model reward: `base(a_eff) + noise`, with `a_eff` pulled toward
/// the mean of earlier actions by `history_weight`.
pub fn year_reward_b(
    year: usize,
    action: Action,
    history: &[Action],
    config: &EnvConfigB,
    rng: &mut SeededRng,
) -> Result<f64> {
    check_year(year)?;
    if history.len() != year - 1 {
        return Err(Error::invalid(format!(
            "year {year} needs {} history entries, got {}",
            year - 1,
            history.len()
        )));
    }
    let effective = config.effective_action(action, history);
    Ok(config.years[year - 1].value(effective) + noise(config.noise_std, rng))
}

pub fn default_env_a() -> EnvConfigA {
    match EnvConfig::from_json(ENV_A_JSON).expect("shipped env_a.json is valid") {
        EnvConfig::A(c) => c,
        EnvConfig::B(_) => unreachable!("env_a.json declares the carryover model"),
    }
}

pub fn default_env_b() -> EnvConfigB {
    match EnvConfig::from_json(ENV_B_JSON).expect("shipped env_b.json is valid") {
        EnvConfig::B(c) => c,
        EnvConfig::A(_) => unreachable!("env_b.json declares the history model"),
    }
}

/// In-process synthetic environment.
#[derive(Debug, Clone)]
pub struct SyntheticEnv {
    config: EnvConfig,
    rng: SeededRng,
}

impl SyntheticEnv {
    /// Noise stream seeded from the config's own `seed`.
    pub fn new(config: impl Into<EnvConfig>) -> Self {
        let config = config.into();
        let seed = config.seed();
        Self {
            config,
            rng: SeededRng::new(seed),
        }
    }

    pub fn with_seed(config: impl Into<EnvConfig>, seed: u64) -> Self {
        Self {
            config: config.into(),
            rng: SeededRng::new(seed),
        }
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }
}

impl EnvironmentModel for SyntheticEnv {
    fn step(&mut self, year: usize, action: Action, history: &[Action]) -> Result<f64> {
        match &self.config {
            EnvConfig::A(c) => {
                check_year(year)?;
                if history.len() != year - 1 {
                    return Err(Error::invalid("history length must equal year - 1"));
                }
                year_reward_a(year, action, history.last().copied(), c, &mut self.rng)
            }
            EnvConfig::B(c) => year_reward_b(year, action, history, c, &mut self.rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(x: f64, y: f64) -> Action {
        Action::new(x, y).unwrap()
    }

    fn quiet() -> SeededRng {
        SeededRng::new(0)
    }

    fn grid_values(cfg: &EnvConfigA, year: usize) -> Vec<f64> {
        let axis = scan_axis(DEFAULT_SCAN_N);
        let mut out = Vec::new();
        for &x in &axis {
            for &y in &axis {
                out.push(cfg.years[year - 1].value(Action::clamped(x, y)));
            }
        }
        out
    }

    #[test]
    fn bump_center_gives_amplitude() {
        let cfg = EnvConfigA::separable(YearSurface::single(a(0.4, 0.7), 110.0, 0.15));
        let r = year_reward_a(1, a(0.4, 0.7), None, &cfg, &mut quiet()).unwrap();
        assert_eq!(r, 110.0);
    }

    #[test]
    fn default_a_low_regions_below_mean() {
        let cfg = default_env_a();
        let centers: Vec<_> = cfg.years[0]
            .bumps
            .iter()
            .filter(|b| b.amplitude < 0.0)
            .map(|b| b.center)
            .collect();
        assert!(centers.contains(&a(0.2, 0.9)));
        assert!(centers.contains(&a(0.8, 0.9)));
        let vals = grid_values(&cfg, 1);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for c in [a(0.2, 0.9), a(0.8, 0.9)] {
            let r = year_reward_a(1, c, None, &cfg, &mut quiet()).unwrap();
            assert!(r < mean, "reward {r} at {c} not below mean {mean}");
        }
    }

    #[test]
    fn default_a_year_one_max_near_110() {
        let cfg = default_env_a();
        let max = grid_values(&cfg, 1).into_iter().fold(f64::MIN, f64::max);
        assert!((104.5..=115.5).contains(&max), "max {max}");
        for y in 1..=HORIZON {
            let m = cfg.years[y - 1].scan_max(DEFAULT_SCAN_N);
            assert!((104.5..=115.5).contains(&m), "year {y} max {m}");
        }
    }

    #[test]
    fn year_and_prev_consistency() {
        let cfg = default_env_a();
        let mut r = quiet();
        assert!(year_reward_a(0, a(0.1, 0.1), None, &cfg, &mut r).is_err());
        assert!(year_reward_a(6, a(0.1, 0.1), Some(a(0.0, 0.0)), &cfg, &mut r).is_err());
        assert!(year_reward_a(2, a(0.1, 0.1), None, &cfg, &mut r).is_err());
        assert!(year_reward_a(1, a(0.1, 0.1), Some(a(0.0, 0.0)), &cfg, &mut r).is_err());
    }

    #[test]
    fn history_length_checked() {
        let cfg = default_env_b();
        assert!(year_reward_b(3, a(0.1, 0.1), &[a(0.0, 0.0)], &cfg, &mut quiet()).is_err());
    }

    #[test]
    fn env_b_year_one_has_no_history_effect() {
        let mut cfg = default_env_b();
        cfg.years = vec![YearSurface::single(a(0.5, 0.5), 100.0, 0.2); HORIZON];
        let r = year_reward_b(1, a(0.5, 0.5), &[], &cfg, &mut quiet()).unwrap();
        assert_eq!(r, 100.0);
    }

    #[test]
    fn env_b_full_weight_collapses_to_history_mean() {
        let mut cfg = default_env_b();
        cfg.years = vec![YearSurface::single(a(0.4, 0.6), 100.0, 0.2); HORIZON];
        cfg.history_weight = 1.0;
        let hist = [a(0.3, 0.5), a(0.5, 0.7)];
        for act in [a(0.0, 0.0), a(1.0, 1.0), a(0.9, 0.1)] {
            let r = year_reward_b(3, act, &hist, &cfg, &mut quiet()).unwrap();
            assert!((r - 100.0).abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn env_b_zero_weight_matches_a_without_carryover() {
        let mut b = default_env_b();
        b.history_weight = 0.0;
        let mut a_cfg = default_env_a();
        a_cfg.carryover_strength = 0.0;
        let prev = a(0.3, 0.3);
        for act in [a(0.1, 0.9), a(0.5, 0.5), a(0.25, 0.55)] {
            let rb = year_reward_b(2, act, &[prev], &b, &mut quiet()).unwrap();
            let ra = year_reward_a(2, act, Some(prev), &a_cfg, &mut quiet()).unwrap();
            assert_eq!(ra, rb);
        }
    }

    #[test]
    fn default_b_zero_weight_reproduces_a_year_one() {
        let mut b = default_env_b();
        b.history_weight = 0.0;
        let a_cfg = default_env_a();
        let axis = scan_axis(DEFAULT_SCAN_N);
        for &x in &axis {
            for &y in &axis {
                let act = Action::clamped(x, y);
                assert_eq!(
                    year_reward_a(1, act, None, &a_cfg, &mut quiet()).unwrap(),
                    year_reward_b(1, act, &[], &b, &mut quiet()).unwrap()
                );
            }
        }
    }

    #[test]
    fn env_b_is_history_sensitive() {
        let cfg = default_env_b();
        let last = a(0.5, 0.5);
        let h1 = [a(0.0, 0.0), last];
        let h2 = [a(1.0, 1.0), last];
        let act = a(0.2, 0.55);
        let r1 = year_reward_b(3, act, &h1, &cfg, &mut quiet()).unwrap();
        let r2 = year_reward_b(3, act, &h2, &cfg, &mut quiet()).unwrap();
        assert_ne!(r1, r2);
    }

    #[test]
    fn validation_rejects_wrong_maximum() {
        let mut cfg = default_env_a();
        cfg.year_max = Some(200.0);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        cfg.year_max = None;
        cfg.years.pop();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn noisy_env_is_seed_deterministic() {
        let mut cfg = default_env_a();
        cfg.noise_std = 5.0;
        let mut e1 = SyntheticEnv::new(cfg.clone());
        let mut e2 = SyntheticEnv::new(cfg);
        let mut hist = Vec::new();
        for y in 1..=HORIZON {
            let act = a(0.1 * y as f64, 0.5);
            let r1 = e1.step(y, act, &hist).unwrap();
            let r2 = e2.step(y, act, &hist).unwrap();
            assert_eq!(r1.to_bits(), r2.to_bits());
            hist.push(act);
        }
    }

    proptest! {
        #[test]
        fn env_a_ignores_history_before_previous(
            xs in proptest::collection::vec(0.0f64..=1.0, 10),
            perm_seed in 0u64..1000,
        ) {
            let acts: Vec<Action> = xs.chunks(2).map(|c| Action::clamped(c[0], c[1])).collect();
            let mut env = SyntheticEnv::new(default_env_a());
            let year = 5;
            let current = acts[4];
            let base = env.step(year, current, &acts[..4]).unwrap();
            let mut earlier = acts[..3].to_vec();
            let mut r = SeededRng::new(perm_seed);
            for i in (1..earlier.len()).rev() {
                earlier.swap(i, r.index(i + 1));
            }
            earlier[0] = Action::uniform(&mut r);
            earlier.push(acts[3]);
            let permuted = env.step(year, current, &earlier).unwrap();
            prop_assert_eq!(base.to_bits(), permuted.to_bits());
        }
    }
}
