//! Genetic algorithm with roulette selection, plus a look at the wheel itself.
//!
//! cargo run --example genetic_algorithm

use scarce_rl::agents::{assign_fitness, roulette_probabilities, run_ga, CrossoverMode, GaConfig, PopulationMember};
use scarce_rl::{BudgetedEnv, EnvConfig, Policy, SeededRng, SyntheticEnv};

fn main() -> scarce_rl::Result<()> {
    // Min-max fitness: the worst member gets 0 and can never be picked.
    let mut rng = SeededRng::new(0);
    let mut population: Vec<PopulationMember> = [120.0, 300.0, 210.0, 90.0]
        .into_iter()
        .map(|r| PopulationMember::new(Policy::uniform(&mut rng), r))
        .collect();
    assign_fitness(&mut population);
    println!("selection probabilities {:.3?}", roulette_probabilities(&population)?);

    let config = EnvConfig::builtin("env_b").expect("builtin");
    for mode in [CrossoverMode::Random, CrossoverMode::Ordered] {
        let ga = GaConfig { crossover_mode: mode, ..GaConfig::default() };
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config.clone()));
        let best = run_ga(&mut env, &ga, &mut SeededRng::new(7))?;
        println!("{mode:?} crossover: best {:.2} {}", best.total, best.policy.to_json());
    }
    Ok(())
}
