use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::experiment::{ComparisonTable, ExperimentResult};
use super::landscape::Landscape;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// On-disk JSON form of a set of experiment results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub experiments: Vec<ExperimentResult>,
}

/// One row per run: agent, env, run, seed, best_total, y1..y5, evaluations_used.
pub fn write_results_csv(results: &[ExperimentResult], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "agent",
        "env",
        "run",
        "seed",
        "best_total",
        "y1",
        "y2",
        "y3",
        "y4",
        "y5",
        "evaluations_used",
    ])?;
    for exp in results {
        for r in &exp.runs {
            let mut row = vec![
                exp.label.clone(),
                exp.env.clone(),
                r.run.to_string(),
                r.seed.to_string(),
                r.best.total.to_string(),
            ];
            row.extend(r.best.yearly_rewards.iter().map(f64::to_string));
            row.push(r.evaluations_used.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_json(results: &[ExperimentResult], mut out: impl Write) -> Result<()> {
    let file = ResultsFile {
        schema_version: SCHEMA_VERSION,
        experiments: results.to_vec(),
    };
    serde_json::to_writer_pretty(&mut out, &file)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_results_json(input: impl Read) -> Result<Vec<ExperimentResult>> {
    let file: ResultsFile = serde_json::from_reader(input)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported results schema {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file.experiments)
}

/// Per-episode totals of every run: agent, run, seed, episode, total.
pub fn write_trace_csv(results: &[ExperimentResult], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["agent", "run", "seed", "episode", "total"])?;
    for exp in results {
        for r in &exp.runs {
            for (e, t) in r.episode_totals.iter().enumerate() {
                w.write_record([
                    exp.label.clone(),
                    r.run.to_string(),
                    r.seed.to_string(),
                    (e + 1).to_string(),
                    t.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison_csv(table: &ComparisonTable, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["agent", "mean", "std", "pct_of_baseline"])?;
    for r in &table.rows {
        w.write_record([
            r.agent.clone(),
            r.mean_best_reward.to_string(),
            r.std_best_reward.to_string(),
            r.pct_of_baseline.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The table rows only (per-run results are left out).
pub fn write_comparison_json(table: &ComparisonTable, mut out: impl Write) -> Result<()> {
    let value = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "env": table.env,
        "baseline": table.baseline,
        "rows": table.rows,
    });
    serde_json::to_writer_pretty(&mut out, &value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// `itn, irs, reward` rows.
pub fn write_landscape_csv(landscape: &Landscape, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["itn", "irs", "reward"])?;
    for &(x, y, r) in &landscape.cells {
        w.write_record([x.to_string(), y.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{landscape_scan, run_experiment, Execution, ExperimentSpec};

    fn sample() -> ExperimentResult {
        run_experiment(
            &ExperimentSpec::new("env_a", "random_search", (0..10).collect()),
            Execution::Parallel,
        )
        .unwrap()
    }

    #[test]
    fn csv_has_header_and_one_row_per_run() {
        let mut buf = Vec::new();
        write_results_csv(&[sample()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 11);
        assert_eq!(
            lines[0],
            "agent,env,run,seed,best_total,y1,y2,y3,y4,y5,evaluations_used"
        );
        assert!(lines[1].starts_with("random_search,env_a,0,0,"));
        assert!(lines[1].ends_with(",100"));
    }

    #[test]
    fn json_round_trip() {
        let results = vec![sample()];
        let mut buf = Vec::new();
        write_results_json(&results, &mut buf).unwrap();
        assert_eq!(read_results_json(buf.as_slice()).unwrap(), results);
    }

    #[test]
    fn wrong_schema_rejected() {
        let text = r#"{"schema_version": 99, "experiments": []}"#;
        assert!(read_results_json(text.as_bytes()).is_err());
    }

    #[test]
    fn landscape_rows() {
        let l = landscape_scan(&crate::env::default_env_b().into(), 2, 7, None).unwrap();
        let mut buf = Vec::new();
        write_landscape_csv(&l, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 50);
    }

    #[test]
    fn trace_rows() {
        let mut buf = Vec::new();
        write_trace_csv(&[sample()], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 10 * 20);
    }
}
