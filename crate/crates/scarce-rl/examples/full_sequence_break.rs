//! Full sequence breaking: play one action in every year, grid-scan the
//! square with 16 constant policies, then refine around the best.
//!
//! cargo run --example full_sequence_break

use scarce_rl::agents::{run_full_sequence_break, GridBreakConfig};
use scarce_rl::{BudgetedEnv, EnvConfig, SeededRng, SyntheticEnv};

fn main() -> scarce_rl::Result<()> {
    for id in ["env_a", "env_b"] {
        let config = EnvConfig::builtin(id).expect("builtin");
        let mut env = BudgetedEnv::with_default_budget(SyntheticEnv::new(config));
        let best = run_full_sequence_break(&mut env, &GridBreakConfig::default(), &mut SeededRng::new(0))?;
        println!("{id}: best {:.2} with {} each year", best.total, best.policy.year(1));
    }
    Ok(())
}
