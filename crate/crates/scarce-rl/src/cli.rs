//! Command-line driver behind the `scarce-rl` binary.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or bad input file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scarce_rl_core::harness::{
    compare_agents, landscape_scan, run_experiment, write_comparison_csv, write_comparison_json,
    write_landscape_csv, write_results_csv, write_results_json, Agent, ComparisonTable, Execution,
    ExperimentSpec,
};
use scarce_rl_core::{EnvConfig, Error};

use crate::client::run_agent_remote;
use crate::service::{self, ServiceConfig};

#[derive(Debug, Parser)]
#[command(name = "scarce-rl", version, about = "Budget-limited policy search for 5-year intervention plans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Overrides applied on top of experiment files.
#[derive(Debug, Clone, clap::Args)]
pub struct Overrides {
    /// Run seeds become seed, seed+1, ...
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Episode budget per run (5 evaluations each).
    #[arg(long)]
    pub episodes: Option<u32>,
    /// Run seeds one after another instead of in parallel. Output is identical.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment spec and write per-run results.
    Run {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run several specs on one environment and tabulate them against random search.
    Compare {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        /// Also write the table to this file (CSV unless --format json).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the table in this format instead of aligned text.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Scan one year's reward surface on an n x n grid.
    Landscape {
        /// Builtin name (env_a, env_b) or path to an environment config.
        env: String,
        #[arg(long, default_value_t = 1)]
        year: usize,
        #[arg(short = 'n', long = "grid", default_value_t = 40)]
        n: usize,
        /// Divide rewards by 100 for plotting.
        #[arg(long)]
        scale_display: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Serve budgeted evaluation sessions over HTTP.
    Serve {
        /// Environment registry; defaults to env_a and env_b.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
    /// Play an agent against the service and check it matches a local run.
    Demo {
        #[arg(long, default_value = "env_a")]
        env: String,
        #[arg(long, default_value = "qlearning_seq_break")]
        agent: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use a running server instead of starting one in-process.
        #[arg(long)]
        addr: Option<String>,
    },
}

/// A failure tagged with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: Error,
}

impl Failure {
    fn usage(error: Error) -> Self {
        Self { code: 2, error }
    }

    fn runtime(error: Error) -> Self {
        Self { code: 1, error }
    }

    /// Bad inputs are usage errors; everything else happened while running.
    fn classify(error: Error) -> Self {
        match error {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Json(_) => Self::usage(error),
            _ => Self::runtime(error),
        }
    }
}

type CliResult = Result<(), Failure>;

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::runtime(Error::Io(e)))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execution(o: &Overrides) -> Execution {
    if o.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load_spec(path: &Path, o: &Overrides) -> Result<ExperimentSpec, Failure> {
    let spec = ExperimentSpec::load(path)
        .map_err(Failure::usage)?
        .with_overrides(o.seed, o.runs, o.episodes);
    spec.validate().map_err(Failure::usage)?;
    Ok(spec)
}

fn cmd_run(spec: &Path, output: Option<&Path>, format: Format, o: &Overrides) -> CliResult {
    let spec = load_spec(spec, o)?;
    let result = run_experiment(&spec, execution(o)).map_err(Failure::runtime)?;
    log::info!(
        "{}: mean best {:.3} over {} runs",
        result.label,
        result.summary.mean,
        result.summary.runs
    );
    let mut out = open_output(output)?;
    let results = std::slice::from_ref(&result);
    match format {
        Format::Csv => write_results_csv(results, &mut out),
        Format::Json => write_results_json(results, &mut out),
    }
    .and_then(|_| out.flush().map_err(Error::Io))
    .map_err(Failure::runtime)
}

fn print_table(table: &ComparisonTable, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "env: {}  baseline: {}", table.env, table.baseline)?;
    writeln!(out, "{:<24} {:>12} {:>10} {:>10}", "agent", "mean", "std", "% base")?;
    for r in &table.rows {
        writeln!(
            out,
            "{:<24} {:>12.3} {:>10.3} {:>9.1}%",
            r.agent, r.mean_best_reward, r.std_best_reward, r.pct_of_baseline
        )?;
    }
    Ok(())
}

fn cmd_compare(paths: &[PathBuf], output: Option<&Path>, format: Option<Format>, o: &Overrides) -> CliResult {
    let specs = paths.iter().map(|p| load_spec(p, o)).collect::<Result<Vec<_>, _>>()?;
    let table = compare_agents(&specs, execution(o)).map_err(Failure::classify)?;
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match format {
        None => print_table(&table, &mut lock).map_err(Error::Io),
        Some(Format::Csv) => write_comparison_csv(&table, &mut lock),
        Some(Format::Json) => write_comparison_json(&table, &mut lock),
    }
    .map_err(Failure::runtime)?;
    if let Some(path) = output {
        let mut out = open_output(Some(path))?;
        match format {
            Some(Format::Json) => write_comparison_json(&table, &mut out),
            _ => write_comparison_csv(&table, &mut out),
        }
        .and_then(|_| out.flush().map_err(Error::Io))
        .map_err(Failure::runtime)?;
    }
    Ok(())
}

fn cmd_landscape(
    env: &str,
    year: usize,
    n: usize,
    scale_display: bool,
    output: Option<&Path>,
    format: Format,
) -> CliResult {
    let config = EnvConfig::resolve(env).map_err(Failure::usage)?;
    let mut scan = landscape_scan(&config, year, n, None).map_err(Failure::classify)?;
    if scale_display {
        scan = scan.for_display();
    }
    let mut out = open_output(output)?;
    match format {
        Format::Csv => write_landscape_csv(&scan, &mut out),
        Format::Json => serde_json::to_writer(&mut out, &scan).map_err(Error::Json),
    }
    .and_then(|_| out.flush().map_err(Error::Io))
    .map_err(Failure::runtime)
}

fn cmd_serve(config: Option<&Path>, addr: &str) -> CliResult {
    let config = match config {
        Some(p) => ServiceConfig::load(p).map_err(Failure::usage)?,
        None => ServiceConfig::default(),
    };
    let envs: Vec<&str> = config.envs.keys().map(String::as_str).collect();
    eprintln!("serving {} on http://{addr}", envs.join(", "));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::runtime(Error::Io(e)))?;
    runtime
        .block_on(async {
            let listener = tokio::net::TcpListener::bind(addr).await?;
            service::serve(listener, config, async {
                let _ = tokio::signal::ctrl_c().await;
                log::info!("shutting down");
            })
            .await
        })
        .map_err(|e| Failure::runtime(Error::Io(e)))
}

fn cmd_demo(env: &str, agent_id: &str, seed: u64, addr: Option<&str>) -> CliResult {
    let agent = Agent::from_parts(agent_id, &serde_json::Value::Null).map_err(Failure::usage)?;
    let local_spec = ExperimentSpec::new(env, agent_id, vec![seed]);
    local_spec.validate().map_err(Failure::usage)?;

    let handle = match addr {
        Some(_) => None,
        None => Some(
            service::spawn(ServiceConfig::default(), "127.0.0.1:0")
                .map_err(|e| Failure::runtime(Error::Io(e)))?,
        ),
    };
    let base_url = match (addr, &handle) {
        (Some(a), _) if a.starts_with("http") => a.to_string(),
        (Some(a), _) => format!("http://{a}"),
        (None, Some(h)) => h.base_url(),
        (None, None) => unreachable!(),
    };
    println!("service: {base_url}");

    let (remote, budget) = run_agent_remote(&base_url, env, &agent, seed).map_err(Failure::classify)?;
    println!(
        "remote  {agent_id} on {env} (seed {seed}): best {:.3} using {} evaluations / {} episodes",
        remote.total,
        budget.used_evaluations(),
        budget.used_episodes()
    );
    println!("        policy {}", remote.policy.to_json());

    let local = run_experiment(&local_spec, Execution::Sequential).map_err(Failure::runtime)?;
    let local_best = &local.runs[0].best;
    println!("local   best {:.3}", local_best.total);
    if local_best == &remote {
        println!("remote and local runs are identical");
        Ok(())
    } else {
        Err(Failure::runtime(Error::Remote(
            "remote run diverged from the in-process run".into(),
        )))
    }
}

pub fn execute(cli: Cli) -> CliResult {
    match cli.command {
        Command::Run { spec, output, format, overrides } => cmd_run(&spec, output.as_deref(), format, &overrides),
        Command::Compare { specs, output, format, overrides } => {
            cmd_compare(&specs, output.as_deref(), format, &overrides)
        }
        Command::Landscape { env, year, n, scale_display, output, format } => {
            cmd_landscape(&env, year, n, scale_display, output.as_deref(), format)
        }
        Command::Serve { config, addr } => cmd_serve(config.as_deref(), &addr),
        Command::Demo { env, agent, seed, addr } => cmd_demo(&env, &agent, seed, addr.as_deref()),
    }
}

/// Parses the process arguments, runs, and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCARCE_RL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
