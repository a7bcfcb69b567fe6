//! A comparison table over paired seeds, baseline first.
//!
//! cargo run --release --example compare_agents

use scarce_rl::harness::{compare_agents, Execution, ExperimentSpec};

fn main() -> scarce_rl::Result<()> {
    let seeds: Vec<u64> = (0..10).collect();
    let specs: Vec<ExperimentSpec> = ["random_search", "ga", "bo1", "plain_q", "qlearning_seq_break", "full_sequence_break"]
        .iter()
        .map(|agent| ExperimentSpec::new("env_a", agent, seeds.clone()))
        .collect();
    let table = compare_agents(&specs, Execution::Parallel)?;
    println!("{:<22} {:>9} {:>8} {:>8}", "agent", "mean", "std", "% base");
    for row in &table.rows {
        println!(
            "{:<22} {:>9.2} {:>8.2} {:>7.0}%",
            row.agent, row.mean_best_reward, row.std_best_reward, row.pct_of_baseline
        );
    }
    Ok(())
}
