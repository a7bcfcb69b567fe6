//! Run a spec file and export per-run results, per-episode traces and JSON.
//!
//! cargo run --example export_results -- specs/env_a_qseq.json /tmp/out

use std::fs::File;
use std::path::PathBuf;

use scarce_rl::harness::{
    read_results_json, run_experiment, write_results_csv, write_results_json, write_trace_csv, Execution,
    ExperimentSpec,
};

fn main() -> scarce_rl::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec_path = args.next().unwrap_or_else(|| "specs/env_a_qseq.json".into());
    let out_dir = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    std::fs::create_dir_all(&out_dir)?;

    let spec = ExperimentSpec::load(&spec_path)?;
    let results = vec![run_experiment(&spec, Execution::Parallel)?];
    write_results_csv(&results, File::create(out_dir.join("results.csv"))?)?;
    write_trace_csv(&results, File::create(out_dir.join("trace.csv"))?)?;
    write_results_json(&results, File::create(out_dir.join("results.json"))?)?;

    let back = read_results_json(File::open(out_dir.join("results.json"))?)?;
    assert_eq!(back, results);
    println!("wrote results.csv, trace.csv and results.json to {}", out_dir.display());
    Ok(())
}
