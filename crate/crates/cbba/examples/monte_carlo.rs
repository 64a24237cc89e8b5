//! A seeded sweep comparing all four reset strategies on shared scenarios,
//! with CSV tables and an SVG box plot written to the temp directory.
//!
//! Run with: cargo run --example monte_carlo

use std::fs;
use std::io::BufWriter;

use cbba::harness::{
    monte_carlo, reconvergence_boxplot, write_aggregates_csv, write_rows_csv, GenParams,
    RunOptions, StrategyParams, SweepConfig,
};
use cbba::replan::StrategyKind;

fn main() -> cbba::Result<()> {
    // A scaled-down version of the full eight-agent/eighty-task setup so
    // the example finishes in seconds; `cbba compare` runs the full one.
    let config = SweepConfig {
        base_seed: 0,
        runs: 10,
        strategies: StrategyKind::ALL.to_vec(),
        params: GenParams {
            n_agents: 4,
            n_tasks: 20,
            n_arrivals: 4,
            capacity: Some(7),
            strategy: StrategyParams {
                n_reset: 8,
                ..StrategyParams::default()
            },
            ..GenParams::default()
        },
        options: RunOptions::default(),
    };

    let result = monte_carlo(&config)?;

    println!(
        "{:<14} {:>12} {:>12} {:>14}",
        "strategy", "rounds_mean", "delta_mean", "cum_delta_mean"
    );
    for a in &result.aggregates {
        println!(
            "{:<14} {:>12.2} {:>12.5} {:>14.5}",
            a.strategy.to_string(),
            a.rounds_mean,
            a.delta_mean,
            a.cumulative_delta_mean
        );
    }

    let dir = std::env::temp_dir().join("cbba_monte_carlo");
    fs::create_dir_all(&dir)?;
    let rows_path = dir.join("rows.csv");
    write_rows_csv(&result.rows, BufWriter::new(fs::File::create(&rows_path)?))?;
    let summary_path = dir.join("summary.csv");
    write_aggregates_csv(
        &result.aggregates,
        BufWriter::new(fs::File::create(&summary_path)?),
    )?;
    let plot_path = dir.join("rounds_boxplot.svg");
    fs::write(&plot_path, reconvergence_boxplot(&result.rows, &config.strategies))?;

    println!("\nwrote:");
    println!("  {}", rows_path.display());
    println!("  {}", summary_path.display());
    println!("  {}", plot_path.display());
    Ok(())
}
