//! Genetic algorithm over 5-year policies.
//!
//! Generation one is random. Each following episode breeds one child from
//! two roulette-selected parents (crossover, then mutation), evaluates it,
//! and appends it to the population.

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::env::{BudgetedEnv, EnvironmentModel};
use crate::error::{Error, Result};
use crate::policy::{better_of, EpisodeRecord, Policy, HORIZON};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverMode {
    /// Each year's tuple comes from either parent with a fair coin flip.
    Random,
    /// One split point: leading years from the first parent, the rest from the second.
    Ordered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    /// Half-width of the uniform perturbation applied to mutated coordinates.
    pub mutation_noise: f64,
    /// Probability that a given year's tuple is mutated.
    pub mutation_rate: f64,
    pub crossover_mode: CrossoverMode,
    /// Restrict the wheel to the two highest-reward members.
    pub elitist: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 6,
            mutation_noise: 0.05,
            mutation_rate: 0.2,
            crossover_mode: CrossoverMode::Random,
            elitist: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("population_size must be >= 2"));
        }
        if !(self.mutation_noise >= 0.0) {
            return Err(Error::invalid("mutation_noise must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::invalid("mutation_rate must be in [0,1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationMember {
    pub policy: Policy,
    pub reward: f64,
    pub fitness: f64,
}

impl PopulationMember {
    pub fn new(policy: Policy, reward: f64) -> Self {
        Self {
            policy,
            reward,
            fitness: 1.0,
        }
    }
}

/// Min-max normalizes rewards into fitness; all-equal rewards get fitness 1.
pub fn assign_fitness(population: &mut [PopulationMember]) {
    let lo = population.iter().map(|m| m.reward).fold(f64::INFINITY, f64::min);
    let hi = population.iter().map(|m| m.reward).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for m in population.iter_mut() {
        m.fitness = if span > 0.0 { (m.reward - lo) / span } else { 1.0 };
    }
}

/// Fitness-proportional selection probabilities `f_j / sum_i f_i`.
pub fn roulette_probabilities(population: &[PopulationMember]) -> Result<Vec<f64>> {
    if population.is_empty() {
        return Err(Error::invalid("empty population"));
    }
    if population.iter().any(|m| !(m.fitness >= 0.0) || !m.fitness.is_finite()) {
        return Err(Error::invalid("fitness must be finite and non-negative"));
    }
    let total: f64 = population.iter().map(|m| m.fitness).sum();
    if !(total > 0.0) {
        return Err(Error::invalid("total fitness must be positive"));
    }
    Ok(population.iter().map(|m| m.fitness / total).collect())
}

/// Spins the wheel once.
pub fn roulette_select<'a>(
    population: &'a [PopulationMember],
    rng: &mut SeededRng,
) -> Result<&'a PopulationMember> {
    let probs = roulette_probabilities(population)?;
    let u = rng.unit();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            last_positive = i;
            acc += p;
            if u < acc {
                return Ok(&population[i]);
            }
        }
    }
    // u landed in the rounding gap above the final cumulative sum.
    Ok(&population[last_positive])
}

pub fn crossover(p1: &Policy, p2: &Policy, mode: CrossoverMode, rng: &mut SeededRng) -> Policy {
    match mode {
        CrossoverMode::Random => Policy::new(std::array::from_fn(|i| {
            if rng.coin() {
                p1.actions()[i]
            } else {
                p2.actions()[i]
            }
        })),
        CrossoverMode::Ordered => crossover_at(p1, p2, 1 + rng.index(HORIZON - 1)),
    }
}

/// Years `1..=point` from `p1`, the rest from `p2`.
pub fn crossover_at(p1: &Policy, p2: &Policy, point: usize) -> Policy {
    Policy::new(std::array::from_fn(|i| {
        if i < point {
            p1.actions()[i]
        } else {
            p2.actions()[i]
        }
    }))
}

/// Perturbs a random non-empty subset of tuples by uniform noise, then clamps.
pub fn mutate(p: &Policy, config: &GaConfig, rng: &mut SeededRng) -> Policy {
    let mut selected = [false; HORIZON];
    if config.mutation_rate > 0.0 {
        while !selected.iter().any(|s| *s) {
            for s in selected.iter_mut() {
                *s = rng.bernoulli(config.mutation_rate);
            }
        }
    } else {
        selected[rng.index(HORIZON)] = true;
    }
    let noise = config.mutation_noise;
    Policy::new(std::array::from_fn(|i| {
        let a = p.actions()[i];
        if !selected[i] || noise == 0.0 {
            return a;
        }
        Action::clamped(
            a.itn() + rng.uniform(-noise, noise),
            a.irs() + rng.uniform(-noise, noise),
        )
    }))
}

pub fn run_ga<M: EnvironmentModel>(
    env: &mut BudgetedEnv<M>,
    config: &GaConfig,
    rng: &mut SeededRng,
) -> Result<EpisodeRecord> {
    config.validate()?;
    if config.population_size as u32 > env.budget().remaining_episodes() {
        return Err(Error::invalid(
            "population_size exceeds the remaining episode budget",
        ));
    }
    let mut best = None;
    let mut population = Vec::new();
    for _ in 0..config.population_size {
        let record = env.evaluate_policy(&Policy::uniform(rng))?;
        population.push(PopulationMember::new(record.policy, record.total));
        best = better_of(best, record, |r| r.total);
    }
    while env.budget().can_run_episode() {
        assign_fitness(&mut population);
        let wheel: Vec<PopulationMember> = if config.elitist {
            top_two(&population)
        } else {
            population.clone()
        };
        let a = roulette_select(&wheel, rng)?.policy;
        let b = roulette_select(&wheel, rng)?.policy;
        let child = mutate(&crossover(&a, &b, config.crossover_mode, rng), config, rng);
        let record = env.evaluate_policy(&child)?;
        population.push(PopulationMember::new(child, record.total));
        best = better_of(best, record, |r| r.total);
    }
    best.ok_or(Error::BudgetExhausted)
}

fn top_two(population: &[PopulationMember]) -> Vec<PopulationMember> {
    let mut sorted = population.to_vec();
    sorted.sort_by(|a, b| b.reward.total_cmp(&a.reward));
    sorted.truncate(2);
    // Fitness stays normalized over the whole population, so the runner-up
    // keeps a non-zero share unless it is the population minimum.
    if sorted.iter().all(|m| m.fitness == 0.0) {
        sorted.iter_mut().for_each(|m| m.fitness = 1.0);
    }
    sorted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EnvConfigA, SyntheticEnv};
    use proptest::prelude::*;

    fn member(f: f64) -> PopulationMember {
        PopulationMember {
            policy: Policy::constant(Action::clamped(f, f)),
            reward: f,
            fitness: f,
        }
    }

    fn pop(fs: &[f64]) -> Vec<PopulationMember> {
        fs.iter().map(|&f| member(f)).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn probability_examples() {
        assert!(close(&roulette_probabilities(&pop(&[0.2, 0.3, 0.5])).unwrap(), &[0.2, 0.3, 0.5]));
        assert!(close(&roulette_probabilities(&pop(&[1.0, 1.0])).unwrap(), &[0.5, 0.5]));
        assert!(close(&roulette_probabilities(&pop(&[2.0, 1.0, 1.0])).unwrap(), &[0.5, 0.25, 0.25]));
    }

    #[test]
    fn empty_population_rejected() {
        assert!(matches!(roulette_probabilities(&[]), Err(Error::InvalidArgument(_))));
        assert!(roulette_select(&[], &mut SeededRng::new(0)).is_err());
    }

    #[test]
    fn fitness_min_max_and_all_equal() {
        let mut p = pop(&[3.0, 5.0, 4.0]);
        assign_fitness(&mut p);
        let f: Vec<f64> = p.iter().map(|m| m.fitness).collect();
        assert_eq!(f, vec![0.0, 1.0, 0.5]);
        let mut q = pop(&[7.0, 7.0]);
        assign_fitness(&mut q);
        assert!(q.iter().all(|m| m.fitness == 1.0));
    }

    #[test]
    fn single_member_always_selected() {
        let p = pop(&[0.4]);
        let mut rng = SeededRng::new(1);
        for _ in 0..100 {
            assert_eq!(roulette_select(&p, &mut rng).unwrap(), &p[0]);
        }
    }

    #[test]
    fn zero_fitness_never_selected() {
        let p = pop(&[1.0, 0.0]);
        let mut rng = SeededRng::new(2);
        for _ in 0..10_000 {
            assert_eq!(roulette_select(&p, &mut rng).unwrap(), &p[0]);
        }
    }

    #[test]
    fn empirical_frequencies_match() {
        let p = pop(&[0.2, 0.3, 0.5]);
        let mut rng = SeededRng::new(2019);
        let mut counts = [0usize; 3];
        let n = 100_000;
        for _ in 0..n {
            let m = roulette_select(&p, &mut rng).unwrap();
            counts[p.iter().position(|x| x == m).unwrap()] += 1;
        }
        for (c, want) in counts.iter().zip([0.2, 0.3, 0.5]) {
            assert!((*c as f64 / n as f64 - want).abs() < 0.01);
        }
    }

    fn pol(v: f64) -> Policy {
        Policy::new(std::array::from_fn(|i| Action::clamped(v, i as f64 / 10.0)))
    }

    #[test]
    fn crossover_identical_parents() {
        let mut rng = SeededRng::new(3);
        for mode in [CrossoverMode::Random, CrossoverMode::Ordered] {
            assert_eq!(crossover(&pol(0.2), &pol(0.2), mode, &mut rng), pol(0.2));
        }
    }

    #[test]
    fn ordered_split_at_two() {
        let (p1, p2) = (pol(0.1), pol(0.9));
        let c = crossover_at(&p1, &p2, 2);
        let expected = [p1.year(1), p1.year(2), p2.year(3), p2.year(4), p2.year(5)];
        assert_eq!(c.actions(), &expected);
    }

    #[test]
    fn zero_noise_mutation_is_identity() {
        let cfg = GaConfig {
            mutation_noise: 0.0,
            ..GaConfig::default()
        };
        let mut rng = SeededRng::new(5);
        assert_eq!(mutate(&pol(0.4), &cfg, &mut rng), pol(0.4));
    }

    #[test]
    fn mutation_changes_at_least_one_tuple() {
        let cfg = GaConfig::default();
        let mut rng = SeededRng::new(6);
        for _ in 0..200 {
            assert_ne!(mutate(&pol(0.5), &cfg, &mut rng), pol(0.5));
        }
    }

    #[test]
    fn origin_mutation_stays_non_negative() {
        let cfg = GaConfig {
            mutation_noise: 0.5,
            mutation_rate: 1.0,
            ..GaConfig::default()
        };
        let mut rng = SeededRng::new(7);
        let p = Policy::constant(Action::clamped(0.0, 0.0));
        for _ in 0..200 {
            for a in mutate(&p, &cfg, &mut rng).actions() {
                assert!(a.itn() >= 0.0 && a.irs() >= 0.0);
            }
        }
    }

    #[test]
    fn full_population_degenerates_to_random_search() {
        let cfg = GaConfig {
            population_size: 20,
            ..GaConfig::default()
        };
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(crate::env::default_env_a()));
        let ga = run_ga(&mut env, &cfg, &mut SeededRng::new(8)).unwrap();
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(crate::env::default_env_a()));
        let rs = crate::agents::run_random_search(&mut env, &mut SeededRng::new(8)).unwrap();
        assert_eq!(ga, rs);
    }

    #[test]
    fn null_env_uses_exactly_twenty_episodes() {
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(EnvConfigA::null()));
        run_ga(&mut env, &GaConfig::default(), &mut SeededRng::new(9)).unwrap();
        assert_eq!(env.budget().used_episodes(), 20);
        assert_eq!(env.budget().used_evaluations(), 100);
    }

    #[test]
    fn elitist_run_completes() {
        let cfg = GaConfig {
            elitist: true,
            crossover_mode: CrossoverMode::Ordered,
            ..GaConfig::default()
        };
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(crate::env::default_env_b()));
        run_ga(&mut env, &cfg, &mut SeededRng::new(10)).unwrap();
        assert_eq!(env.budget().used_episodes(), 20);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(EnvConfigA::null()));
        for cfg in [
            GaConfig { population_size: 1, ..GaConfig::default() },
            GaConfig { population_size: 21, ..GaConfig::default() },
            GaConfig { mutation_noise: -1.0, ..GaConfig::default() },
        ] {
            assert!(run_ga(&mut env, &cfg, &mut SeededRng::new(0)).is_err());
        }
        assert_eq!(env.budget().used_evaluations(), 0);
    }

    proptest! {
        #[test]
        fn probabilities_form_a_distribution(fs in proptest::collection::vec(0.0f64..10.0, 1..30)) {
            let mut fs = fs;
            fs[0] += 0.1;
            let p = roulette_probabilities(&pop(&fs)).unwrap();
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn probabilities_scale_invariant(
            fs in proptest::collection::vec(0.01f64..10.0, 1..30),
            k in 0.001f64..1000.0,
        ) {
            let p = roulette_probabilities(&pop(&fs)).unwrap();
            let scaled: Vec<f64> = fs.iter().map(|f| f * k).collect();
            let q = roulette_probabilities(&pop(&scaled)).unwrap();
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn crossover_tuples_come_from_parents(
            xs in proptest::collection::vec(0.0f64..=1.0, 20),
            seed in 0u64..1000,
            ordered in any::<bool>(),
        ) {
            let p1 = Policy::from_flat(&xs[..10]).unwrap();
            let p2 = Policy::from_flat(&xs[10..]).unwrap();
            let mode = if ordered { CrossoverMode::Ordered } else { CrossoverMode::Random };
            let c = crossover(&p1, &p2, mode, &mut SeededRng::new(seed));
            for y in 1..=HORIZON {
                prop_assert!(c.year(y) == p1.year(y) || c.year(y) == p2.year(y));
            }
        }

        #[test]
        fn mutation_stays_in_range_and_bounded(
            xs in proptest::collection::vec(0.0f64..=1.0, 10),
            seed in 0u64..1000,
        ) {
            let p = Policy::from_flat(&xs).unwrap();
            let cfg = GaConfig::default();
            let m = mutate(&p, &cfg, &mut SeededRng::new(seed));
            for (a, b) in p.actions().iter().zip(m.actions()) {
                for (x, y) in a.coords().iter().zip(b.coords()) {
                    prop_assert!((0.0..=1.0).contains(&y));
                    prop_assert!((x - y).abs() <= cfg.mutation_noise + 1e-15);
                }
            }
        }
    }
}
