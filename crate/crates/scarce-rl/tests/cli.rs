use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scarce-rl"));
    c.current_dir(repo_root());
    c
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn run_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&["run", "specs/env_a_qseq.json", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert_eq!(lines[0], "agent,env,run,seed,best_total,y1,y2,y3,y4,y5,evaluations_used");
}

#[test]
fn overrides_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("o{i}.json"))).collect();
    for p in &paths {
        let o = run(&[
            "run", "specs/env_a/02_ga.json", "--runs", "1", "--seed", "42", "--format", "json", "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let runs = &v["experiments"][0]["runs"];
    assert_eq!(runs.as_array().unwrap().len(), 1);
    assert_eq!(runs[0]["seed"], 42);
}

#[test]
fn sequential_flag_gives_same_bytes() {
    let a = run(&["run", "specs/env_b/08_qlearning_seq_break.json", "--runs", "4"]);
    let b = run(&["run", "specs/env_b/08_qlearning_seq_break.json", "--runs", "4", "--sequential"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_and_bad_input_errors_exit_2() {
    assert_eq!(code(&run(&["run", "no/such/spec.json"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["landscape", "env_a", "-n", "1"])), 2);
    assert_eq!(code(&run(&["landscape", "env_a", "--year", "6"])), 2);
    assert_eq!(code(&run(&["landscape", "no_such_env"])), 2);
    let mismatched = run(&["compare", "specs/env_a/01_random_search.json", "specs/env_b/02_ga.json"]);
    assert_eq!(code(&mismatched), 2);
    assert!(String::from_utf8_lossy(&mismatched.stderr).contains("different environments"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"env": "env_a", "agent": "nope"}"#).unwrap();
    assert_eq!(code(&run(&["run", bad.to_str().unwrap()])), 2);
    std::fs::write(&bad, r#"{"env": "env_a", "agent": "ga", "runs": 3, "seeds": [1]}"#).unwrap();
    assert_eq!(code(&run(&["run", bad.to_str().unwrap()])), 2);
}

#[test]
fn runtime_failures_exit_1() {
    // The output path is a directory, so writing results fails after the run.
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "specs/env_a/01_random_search.json", "--runs", "1", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    // Nothing listens on port 1.
    assert_eq!(code(&run(&["demo", "--addr", "127.0.0.1:1"])), 1);
}

#[test]
fn compare_baseline_only_is_100_percent() {
    let o = run(&["compare", "specs/env_a/01_random_search.json", "--runs", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("random_search,"));
    assert!(lines[1].ends_with(",100"));
}

#[test]
fn compare_suite_puts_baseline_first() {
    let specs = [
        "specs/env_a/01_random_search.json",
        "specs/env_a/02_ga.json",
        "specs/env_a/06_full_sequence_break.json",
        "specs/env_a/07_plain_q.json",
        "specs/env_a/08_qlearning_seq_break.json",
    ];
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let mut args = vec!["compare"];
    args.extend(specs);
    args.extend(["--runs", "3", "-o", out.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0);
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("% base"));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("random_search,"));

    args.extend(["--format", "json"]);
    let o = run(&args);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["baseline"], "random_search");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn landscape_rows_and_scaling() {
    let full = run(&["landscape", "env_a", "--year", "1", "-n", "40"]);
    assert_eq!(code(&full), 0);
    let text = String::from_utf8(full.stdout).unwrap();
    assert_eq!(text.lines().count(), 1601);

    let raw = String::from_utf8(run(&["landscape", "env_a", "-n", "2"]).stdout).unwrap();
    let scaled = String::from_utf8(run(&["landscape", "env_a", "-n", "2", "--scale-display"]).stdout).unwrap();
    assert_eq!(raw.lines().count(), 5);
    for (r, s) in raw.lines().zip(scaled.lines()).skip(1) {
        let r: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        let s: f64 = s.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(s, r / 100.0);
    }
}

#[test]
fn demo_matches_local_run() {
    let o = run(&["demo", "--agent", "random_search", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("identical"));
}

#[test]
fn serve_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("envs.json");
    std::fs::write(&cfg, r#"{"envs": {}}"#).unwrap();
    assert_eq!(code(&run(&["serve", "--config", cfg.to_str().unwrap(), "--addr", "127.0.0.1:0"])), 2);
}

#[test]
fn log_level_comes_from_environment() {
    let o = bin()
        .args(["run", "specs/env_a/01_random_search.json", "--runs", "1"])
        .env("SCARCE_RL_LOG", "info")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mean best"));
}
