//! Command-line front end: generate scenarios, run a single experiment,
//! sweep seeds across strategies, or re-validate a saved world.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cbba::harness::{
    self, load_world, monte_carlo, reconvergence_boxplot, run_experiment, save_world,
    validate_assignment, write_aggregates_csv, write_rows_csv, GenParams, RunOptions,
    Scenario, StrategyParams, SweepConfig,
};
use cbba::replan::StrategyKind;
use cbba::{Error, TopologySpec};

const EXIT_OTHER: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cbba",
    version,
    about = "Decentralized task allocation: bundle auctions with partial replanning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file from a seed.
    Generate(GenerateArgs),
    /// Run one scenario under one reset strategy.
    Run(RunArgs),
    /// Sweep seeds across strategies and emit comparison tables.
    Compare(CompareArgs),
    /// Re-check a saved final world against the allocation constraints.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of agents.
    #[arg(long, default_value_t = 8)]
    agents: usize,
    /// Number of initially known tasks.
    #[arg(long, default_value_t = 80)]
    tasks: usize,
    /// Number of tasks arriving one at a time after convergence.
    #[arg(long, default_value_t = 8)]
    arrivals: usize,
    /// Side length of the square working area.
    #[arg(long, default_value_t = 100.0)]
    area: f64,
    /// Per-agent path capacity; omitted derives a slack capacity.
    #[arg(long, conflicts_with = "constrained")]
    capacity: Option<usize>,
    /// Use the capacity-tight preset (capacity 10).
    #[arg(long)]
    constrained: bool,
    /// Agent travel speed.
    #[arg(long, default_value_t = 1.0)]
    speed: f64,
    /// Reward discount factor per time unit, in (0, 1].
    #[arg(long, default_value_t = 0.95)]
    discount: f64,
    /// Static reward per task.
    #[arg(long, default_value_t = 1.0)]
    reward: f64,
    /// Topology: complete, line, ring, or random-geometric.
    #[arg(long, default_value = "complete")]
    topology: String,
    /// Connection radius for random-geometric topologies (unit square).
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    /// Team-wide task release budget for partial strategies.
    #[arg(long, default_value_t = 24)]
    n_reset: usize,
    /// Per-agent release count for partial-local (default n_reset/agents).
    #[arg(long)]
    per_agent_reset: Option<usize>,
    /// Response-time budget; derives n_reset from the (sub)team diameter.
    #[arg(long)]
    t_response: Option<f64>,
    /// Wall-clock duration of one communication round.
    #[arg(long, default_value_t = 1.0)]
    round_duration: f64,
    /// Restrict partial-team replanning to the closest such subteam.
    #[arg(long)]
    subteam: Option<usize>,
}

impl GenArgs {
    fn to_params(&self) -> Result<GenParams, Error> {
        let topology = match self.topology.as_str() {
            "complete" => TopologySpec::Complete,
            "line" => TopologySpec::Line,
            "ring" => TopologySpec::Ring,
            "random-geometric" => TopologySpec::RandomGeometric {
                radius: self.radius,
            },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown topology '{other}' (expected complete, line, ring, \
                     random-geometric)"
                )))
            }
        };
        let capacity = if self.constrained {
            GenParams::constrained().capacity
        } else {
            self.capacity
        };
        Ok(GenParams {
            n_agents: self.agents,
            n_tasks: self.tasks,
            n_arrivals: self.arrivals,
            area: self.area,
            capacity,
            speed: self.speed,
            discount: self.discount,
            reward: self.reward,
            topology,
            strategy: StrategyParams {
                n_reset: self.n_reset,
                per_agent_reset: self.per_agent_reset,
                t_response: self.t_response,
                round_duration: self.round_duration,
                subteam_size: self.subteam,
            },
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Scenario seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
    /// Output scenario file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file to run.
    #[arg(long)]
    scenario: PathBuf,
    /// Reset strategy: none, full, partial-local, partial-team.
    #[arg(long)]
    strategy: StrategyKind,
    /// Per-episode round ceiling (default 10 * tasks * diameter).
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Write the belief-change event log (JSON lines) here.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Also log every received snapshot into the event log.
    #[arg(long, requires = "events")]
    log_snapshots: bool,
    /// Save the final world state here.
    #[arg(long)]
    save_world: Option<PathBuf>,
    /// Write run metrics as JSON here.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First seed of the sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeds to run.
    #[arg(long, default_value_t = 30)]
    seeds: usize,
    /// Comma-separated strategies to compare.
    #[arg(long, default_value = "none,full,partial-local,partial-team")]
    strategies: String,
    #[command(flatten)]
    gen: GenArgs,
    /// Per-episode round ceiling (default 10 * tasks * diameter).
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Write per-run rows as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-strategy aggregates as CSV here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write a reconvergence-rounds box plot (SVG) here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Saved world file to check.
    #[arg(long)]
    world: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Run(args) => run(args),
        Command::Compare(args) => compare(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::Io(_) => EXIT_OTHER,
        _ => EXIT_PARSE,
    }
}

fn generate(args: GenerateArgs) -> Result<ExitCode, Error> {
    let params = args.gen.to_params()?;
    let scenario = Scenario::generate(args.seed, &params)?;
    scenario.save(&args.out)?;
    println!(
        "wrote {} ({} agents, {} tasks, {} arrivals, capacity {}, hash {:016x})",
        args.out.display(),
        scenario.agents.len(),
        scenario.tasks.len(),
        scenario.arrivals.len(),
        params.effective_capacity(),
        scenario.content_hash()
    );
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> Result<ExitCode, Error> {
    let scenario = Scenario::load(&args.scenario)?;
    let options = RunOptions {
        round_ceiling: args.max_rounds,
        record_events: args.events.is_some(),
        log_snapshots: args.log_snapshots,
        ..RunOptions::default()
    };

    let outcome = match run_experiment(&scenario, args.strategy, &options) {
        Ok(outcome) => outcome,
        Err(error) => {
            // A diverging run still leaves its event tail for post-mortems.
            if let (Some(path), Error::NonConvergence { events, .. }) =
                (&args.events, &error)
            {
                let mut writer = BufWriter::new(File::create(path)?);
                for record in events {
                    let line = serde_json::to_string(record)
                        .expect("log records always serialize");
                    writeln!(writer, "{line}")?;
                }
            }
            return Err(error);
        }
    };

    let metrics = &outcome.metrics;
    println!(
        "scenario {} (seed {}, hash {:016x}): {} agents, {} tasks, {} arrivals",
        args.scenario.display(),
        scenario.seed,
        scenario.content_hash(),
        scenario.agents.len(),
        scenario.tasks.len(),
        scenario.arrivals.len()
    );
    println!("strategy {}", args.strategy);
    println!(
        "initial allocation: {} rounds, team score {:.6}",
        metrics.initial_rounds, metrics.initial_score
    );
    for arrival in &metrics.arrivals {
        println!(
            "arrival {} (task {}): {} rounds, delta {:.6}, team score {:.6}",
            arrival.arrival_index,
            arrival.task,
            arrival.rounds,
            arrival.delta,
            arrival.score_after
        );
    }
    println!(
        "total: {} messages, cumulative delta {:.6}",
        metrics.messages,
        metrics.cumulative_delta()
    );

    if let Some(path) = &args.events {
        if let Some(log) = &outcome.world.recorder {
            let writer = BufWriter::new(File::create(path)?);
            log.write_jsonl(writer)?;
            println!("wrote {} event records to {}", log.len(), path.display());
        }
    }
    if let Some(path) = &args.metrics {
        let mut text =
            serde_json::to_string_pretty(metrics).expect("metrics always serialize");
        text.push('\n');
        std::fs::write(path, text)?;
        println!("wrote metrics to {}", path.display());
    }
    if let Some(path) = &args.save_world {
        save_world(&outcome.world, path)?;
        println!("wrote final world to {}", path.display());
    }

    let report = validate_assignment(&outcome.world);
    if report.all_passed() {
        println!("validation: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        print!("{report}");
        Ok(ExitCode::from(EXIT_VALIDATION))
    }
}

fn compare(args: CompareArgs) -> Result<ExitCode, Error> {
    let mut strategies = Vec::new();
    for name in args.strategies.split(',') {
        strategies.push(name.trim().parse::<StrategyKind>()?);
    }
    let config = SweepConfig {
        base_seed: args.seed,
        runs: args.seeds,
        strategies,
        params: args.gen.to_params()?,
        options: RunOptions {
            round_ceiling: args.max_rounds,
            ..RunOptions::default()
        },
    };

    let result = monte_carlo(&config)?;

    println!(
        "{:<14} {:>5} {:>13} {:>13} {:>9} {:>9} {:>12} {:>15}",
        "strategy",
        "runs",
        "static_mean",
        "rounds_mean",
        "rounds_min",
        "rounds_max",
        "delta_mean",
        "cum_delta_mean"
    );
    for a in &result.aggregates {
        println!(
            "{:<14} {:>5} {:>13.2} {:>13.2} {:>9} {:>9} {:>12.5} {:>15.5}",
            a.strategy.to_string(),
            a.runs,
            a.static_rounds_mean,
            a.rounds_mean,
            a.rounds_min,
            a.rounds_max,
            a.delta_mean,
            a.cumulative_delta_mean
        );
    }

    if let Some(path) = &args.out {
        let writer = BufWriter::new(File::create(path)?);
        write_rows_csv(&result.rows, writer)?;
        println!("wrote {} rows to {}", result.rows.len(), path.display());
    }
    if let Some(path) = &args.summary {
        let writer = BufWriter::new(File::create(path)?);
        write_aggregates_csv(&result.aggregates, writer)?;
        println!("wrote summary to {}", path.display());
    }
    if let Some(path) = &args.plot {
        let svg = reconvergence_boxplot(&result.rows, &config.strategies);
        std::fs::write(path, svg)?;
        println!("wrote box plot to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(args: ValidateArgs) -> Result<ExitCode, Error> {
    let world = load_world(&args.world)?;
    let report = harness::validate_assignment(&world);
    print!("{report}");
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VALIDATION))
    }
}
