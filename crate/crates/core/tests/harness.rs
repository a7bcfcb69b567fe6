use proptest::prelude::*;
use scarce_rl_core::harness::{
    read_results_json, run_experiment, write_results_csv, write_results_json, Execution, ExperimentSpec,
    AGENT_IDS,
};
use scarce_rl_core::{BudgetedEnv, EnvConfig, SeededRng, SyntheticEnv};

#[test]
fn shipped_configs_validate_and_round_trip() {
    for id in ["env_a", "env_b"] {
        let c = EnvConfig::builtin(id).unwrap();
        c.validate().unwrap();
        let again = EnvConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(again.to_json(), c.to_json());
    }
}

#[test]
fn run_order_does_not_matter() {
    for agent in ["ga", "bo2", "plain_q"] {
        let forward = run_experiment(&ExperimentSpec::new("env_b", agent, vec![3, 1, 4, 1, 5]), Execution::Parallel)
            .unwrap();
        let backward =
            run_experiment(&ExperimentSpec::new("env_b", agent, vec![5, 1, 4, 1, 3]), Execution::Sequential)
                .unwrap();
        for (f, b) in forward.runs.iter().zip(backward.runs.iter().rev()) {
            assert_eq!(f.seed, b.seed);
            assert_eq!(f.best, b.best, "{agent} seed {}", f.seed);
        }
    }
}

#[test]
fn exports_round_trip() {
    let result = run_experiment(&ExperimentSpec::new("env_a", "bo3", (0..10).collect()), Execution::Parallel).unwrap();
    let mut csv = Vec::new();
    write_results_csv(std::slice::from_ref(&result), &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 11);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    write_results_json(std::slice::from_ref(&result), std::fs::File::create(&path).unwrap()).unwrap();
    let back = read_results_json(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(back, vec![result]);
}

#[test]
fn unwritable_path_is_an_io_error() {
    let result = run_experiment(&ExperimentSpec::new("env_a", "random_search", vec![0]), Execution::Parallel).unwrap();
    let err = std::fs::File::create("/nonexistent-dir/x.csv")
        .map_err(scarce_rl_core::Error::from)
        .and_then(|f| write_results_csv(&[result], f));
    assert!(matches!(err, Err(scarce_rl_core::Error::Io(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_agent_respects_any_budget(agent in 0..AGENT_IDS.len(), episodes in 1u32..=20, seed in any::<u64>()) {
        let spec = ExperimentSpec::new("env_a", AGENT_IDS[agent], vec![seed]);
        let (env, agent, _) = spec.validate().unwrap();
        let mut budgeted = BudgetedEnv::new(SyntheticEnv::new(env), scarce_rl_core::Budget::episodes(episodes));
        // Some agents need a minimum number of episodes; they must fail cleanly, never overspend.
        let _ = agent.run(&mut budgeted, &mut SeededRng::new(seed));
        let b = budgeted.budget();
        prop_assert!(b.used_episodes() <= episodes);
        prop_assert!(b.used_evaluations() <= 5 * episodes);
    }
}
