//! Random search: 20 uniformly random 5-year policies, keep the best.
//!
//! cargo run --example random_search

use scarce_rl::agents::run_random_search;
use scarce_rl::{BudgetedEnv, EnvConfig, SeededRng, SyntheticEnv};

fn main() -> scarce_rl::Result<()> {
    let config = EnvConfig::builtin("env_a").expect("builtin");
    let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config));
    let best = run_random_search(&mut env, &mut SeededRng::new(1))?;
    println!("best total {:.2}", best.total);
    println!("policy     {}", best.policy.to_json());
    println!("per year   {:.2?}", best.yearly_rewards);
    println!("budget     {} evaluations used", env.budget().used_evaluations());
    Ok(())
}
