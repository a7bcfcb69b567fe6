//! The three Gaussian-process optimizers: year-by-year (BO1), one joint
//! 10-D surrogate (BO2), and the two-year boosted ensemble (BO3).
//!
//! cargo run --release --example bayesian_optimization

use scarce_rl::agents::{bo1_year1_diagnostic, run_bo1, run_bo2, run_bo3, BoParams};
use scarce_rl::{BudgetedEnv, EnvConfig, SeededRng, SyntheticEnv};

fn main() -> scarce_rl::Result<()> {
    let config = EnvConfig::builtin("env_a").expect("builtin");
    let params = BoParams::default();
    let fresh = || BudgetedEnv::with_default_budget(SyntheticEnv::new(config.clone()));

    let bo1 = run_bo1(&mut fresh(), &params, &mut SeededRng::new(3))?;
    println!("BO1 best {:.2}; year-1 incumbent after phase 1 {:?}", bo1.best.total, bo1.year1_after_phase1);

    let bo2 = run_bo2(&mut fresh(), &params, &mut SeededRng::new(3))?;
    println!("BO2 best {:.2}", bo2.total);

    let bo3 = run_bo3(&mut fresh(), &params, &mut SeededRng::new(3))?;
    println!("BO3 best 2-year reward {:.2}", bo3.best.sub_total(2));
    for (episode, w) in &bo3.weights {
        println!("  after episode {episode:>2}: w0 {:.2} w1 {:.2} (mse {:.1})", w.w0, w.w1, w.mse);
    }

    // Unbudgeted: how close do 30 year-1 queries get to the year-1 optimum?
    let (action, reward) = bo1_year1_diagnostic(&config, &params, 30)?;
    println!("year-1 search with 30 queries: {action} -> {reward:.2}");
    Ok(())
}
