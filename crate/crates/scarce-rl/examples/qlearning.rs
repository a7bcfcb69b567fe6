//! Q-learning with and without first-year sequence breaking.
//!
//! cargo run --example qlearning

use scarce_rl::agents::{run_plain_qlearning, run_qlearning_seq_break, EpsilonSchedule, QConfig};
use scarce_rl::{BudgetedEnv, EnvConfig, SeededRng, SyntheticEnv};

fn main() -> scarce_rl::Result<()> {
    let config = EnvConfig::builtin("env_a").expect("builtin");
    let q = QConfig::default();

    let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config.clone()));
    let schedule = EpsilonSchedule::Stretched { start: 0.8, episodes: 20 };
    let (plain, _) = run_plain_qlearning(&mut env, &q, schedule, 20, &mut SeededRng::new(5))?;
    println!("plain Q-learning:   {:.2} {}", plain.total, plain.policy.to_json());

    let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config));
    let out = run_qlearning_seq_break(&mut env, &q, &mut SeededRng::new(5))?;
    println!("first-year break:   {:.2} {}", out.best.total, out.best.policy.to_json());
    println!("year-1 search found {} (reward {:.2}) with probes:", out.first_year.a_max, out.first_year.reward_max);
    for (action, reward) in &out.first_year.probes {
        println!("  {action} -> {reward:.2}");
    }
    println!("greedy policy of the learned table: {}", out.table.greedy_policy().to_json());
    Ok(())
}
