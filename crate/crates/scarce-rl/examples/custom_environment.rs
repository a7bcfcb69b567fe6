//! Define an environment in JSON, validate it, and run an experiment on it.
//!
//! cargo run --example custom_environment

use scarce_rl::harness::{run_experiment, Execution, ExperimentSpec};
use scarce_rl::EnvConfig;

const SINGLE_PEAK: &str = r#"{
  "model": "history",
  "history_weight": 0.4,
  "years": [
    {"bumps": [{"center": [0.7, 0.3], "amplitude": 100.0, "width": 0.2}]},
    {"bumps": [{"center": [0.7, 0.3], "amplitude": 100.0, "width": 0.2}]},
    {"bumps": [{"center": [0.6, 0.4], "amplitude": 100.0, "width": 0.2}]},
    {"bumps": [{"center": [0.5, 0.5], "amplitude": 100.0, "width": 0.2}]},
    {"bumps": [{"center": [0.4, 0.6], "amplitude": 100.0, "width": 0.2}]}
  ],
  "noise_std": 2.0,
  "seed": 17
}"#;

fn main() -> scarce_rl::Result<()> {
    let config = EnvConfig::from_json(SINGLE_PEAK)?;
    let path = std::env::temp_dir().join("scarce_rl_single_peak.json");
    std::fs::write(&path, config.to_json())?;

    // Experiment specs take a builtin name or a path to an environment file.
    for agent in ["random_search", "full_sequence_break", "qlearning_seq_break"] {
        let spec = ExperimentSpec::new(path.to_str().expect("utf-8 path"), agent, (0..8).collect());
        let result = run_experiment(&spec, Execution::Parallel)?;
        println!("{agent:<22} mean best {:.2} (sd {:.2})", result.summary.mean, result.summary.std);
    }
    Ok(())
}
