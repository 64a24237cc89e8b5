//! Seed-by-strategy sweeps: every strategy runs against the identical
//! scenario per seed, rows land in a CSV-friendly table, and per-strategy
//! aggregates summarize rounds and score gains.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::experiment::{run_experiment, tag_run, RunOptions};
use crate::harness::scenario::{GenParams, Scenario};
use crate::harness::validate::validate_assignment;
use crate::replan::StrategyKind;

/// Sweep description: which seeds, which strategies, what world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base_seed: u64,
    /// Number of scenarios; seeds run base_seed..base_seed+runs.
    pub runs: usize,
    pub strategies: Vec<StrategyKind>,
    pub params: GenParams,
    pub options: RunOptions,
}

/// One result row: a (seed, strategy, episode) triple. Episode 0 is the
/// initial static allocation; episodes >= 1 are arrivals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub scenario_hash: u64,
    pub strategy: StrategyKind,
    pub arrival_index: usize,
    pub rounds: u64,
    pub score_before: f64,
    pub score_after: f64,
    pub delta: f64,
}

/// Mean/min/max summaries per strategy over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyAggregate {
    pub strategy: StrategyKind,
    pub runs: usize,
    pub static_rounds_mean: f64,
    /// Reconvergence rounds per arrival episode.
    pub rounds_mean: f64,
    pub rounds_min: u64,
    pub rounds_max: u64,
    /// Score gain per arrival episode.
    pub delta_mean: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Score gain summed over a whole run, then aggregated across seeds.
    pub cumulative_delta_mean: f64,
    pub cumulative_delta_min: f64,
    pub cumulative_delta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<StrategyAggregate>,
}

impl SweepResult {
    pub fn aggregate_for(&self, strategy: StrategyKind) -> Option<&StrategyAggregate> {
        self.aggregates.iter().find(|a| a.strategy == strategy)
    }
}

/// Runs the sweep. Each seed's scenario is generated once and shared by all
/// strategies; every run is validated before its rows are recorded.
pub fn monte_carlo(config: &SweepConfig) -> Result<SweepResult> {
    if config.runs == 0 {
        return Err(Error::InvalidParameter("sweep needs at least one seed".into()));
    }
    if config.strategies.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one strategy".into(),
        ));
    }

    let mut rows = Vec::new();
    for offset in 0..config.runs {
        let seed = config.base_seed + offset as u64;
        let scenario = Scenario::generate(seed, &config.params)?;
        let hash = scenario.content_hash();
        for &strategy in &config.strategies {
            let outcome = run_experiment(&scenario, strategy, &config.options)
                .map_err(|e| tag_run(e, seed, strategy))?;
            let report = validate_assignment(&outcome.world);
            if !report.all_passed() {
                return Err(Error::Config(format!(
                    "seed {seed}, strategy {strategy}: final assignment invalid\n{report}"
                )));
            }
            let metrics = &outcome.metrics;
            rows.push(SweepRow {
                seed,
                scenario_hash: hash,
                strategy,
                arrival_index: 0,
                rounds: metrics.initial_rounds,
                score_before: 0.0,
                score_after: metrics.initial_score,
                delta: metrics.initial_score,
            });
            for arrival in &metrics.arrivals {
                rows.push(SweepRow {
                    seed,
                    scenario_hash: hash,
                    strategy,
                    arrival_index: arrival.arrival_index,
                    rounds: arrival.rounds,
                    score_before: arrival.score_before,
                    score_after: arrival.score_after,
                    delta: arrival.delta,
                });
            }
        }
    }

    let aggregates = aggregate(&rows, &config.strategies);
    Ok(SweepResult { rows, aggregates })
}

fn aggregate(rows: &[SweepRow], strategies: &[StrategyKind]) -> Vec<StrategyAggregate> {
    strategies
        .iter()
        .map(|&strategy| {
            let static_rounds: Vec<u64> = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.arrival_index == 0)
                .map(|r| r.rounds)
                .collect();
            let arrival_rows: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.arrival_index > 0)
                .collect();
            let rounds: Vec<u64> = arrival_rows.iter().map(|r| r.rounds).collect();
            let deltas: Vec<f64> = arrival_rows.iter().map(|r| r.delta).collect();

            let mut per_seed = std::collections::BTreeMap::new();
            for row in &arrival_rows {
                *per_seed.entry(row.seed).or_insert(0.0) += row.delta;
            }
            let cumulative: Vec<f64> = per_seed.into_values().collect();

            StrategyAggregate {
                strategy,
                runs: static_rounds.len(),
                static_rounds_mean: mean_u64(&static_rounds),
                rounds_mean: mean_u64(&rounds),
                rounds_min: rounds.iter().copied().min().unwrap_or(0),
                rounds_max: rounds.iter().copied().max().unwrap_or(0),
                delta_mean: mean(&deltas),
                delta_min: float_min(&deltas),
                delta_max: float_max(&deltas),
                cumulative_delta_mean: mean(&cumulative),
                cumulative_delta_min: float_min(&cumulative),
                cumulative_delta_max: float_max(&cumulative),
            }
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn mean_u64(values: &[u64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<u64>() as f64 / values.len() as f64
    }
}

fn float_min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn float_max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Writes per-run rows as CSV with a header row.
pub fn write_rows_csv(rows: &[SweepRow], mut writer: impl Write) -> Result<()> {
    writeln!(
        writer,
        "seed,scenario_hash,strategy,arrival,rounds,score_before,score_after,delta"
    )?;
    for row in rows {
        writeln!(
            writer,
            "{},{:016x},{},{},{},{},{},{}",
            row.seed,
            row.scenario_hash,
            row.strategy,
            row.arrival_index,
            row.rounds,
            row.score_before,
            row.score_after,
            row.delta
        )?;
    }
    Ok(())
}

/// Writes per-strategy aggregates as CSV with a header row.
pub fn write_aggregates_csv(
    aggregates: &[StrategyAggregate],
    mut writer: impl Write,
) -> Result<()> {
    writeln!(
        writer,
        "strategy,runs,static_rounds_mean,rounds_mean,rounds_min,rounds_max,\
         delta_mean,delta_min,delta_max,cumulative_delta_mean,cumulative_delta_min,\
         cumulative_delta_max"
    )?;
    for a in aggregates {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            a.strategy,
            a.runs,
            a.static_rounds_mean,
            a.rounds_mean,
            a.rounds_min,
            a.rounds_max,
            a.delta_mean,
            a.delta_min,
            a.delta_max,
            a.cumulative_delta_mean,
            a.cumulative_delta_min,
            a.cumulative_delta_max
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::StrategyParams;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            base_seed: 0,
            runs: 2,
            strategies: StrategyKind::ALL.to_vec(),
            params: GenParams {
                n_agents: 3,
                n_tasks: 5,
                n_arrivals: 2,
                capacity: Some(3),
                strategy: StrategyParams {
                    n_reset: 2,
                    ..StrategyParams::default()
                },
                ..GenParams::default()
            },
            options: RunOptions::default(),
        }
    }

    #[test]
    fn one_seed_runs_share_a_scenario_hash() {
        let config = SweepConfig {
            runs: 1,
            ..tiny_config()
        };
        let result = monte_carlo(&config).unwrap();
        let hashes: std::collections::BTreeSet<u64> =
            result.rows.iter().map(|r| r.scenario_hash).collect();
        assert_eq!(hashes.len(), 1);
        // 4 strategies x (1 static + 2 arrivals) rows.
        assert_eq!(result.rows.len(), 12);
    }

    #[test]
    fn static_traces_are_identical_across_strategies() {
        let result = monte_carlo(&tiny_config()).unwrap();
        for seed in [0, 1] {
            let static_rows: Vec<&SweepRow> = result
                .rows
                .iter()
                .filter(|r| r.seed == seed && r.arrival_index == 0)
                .collect();
            assert_eq!(static_rows.len(), 4);
            for row in &static_rows {
                assert_eq!(row.rounds, static_rows[0].rounds);
                assert_eq!(row.score_after, static_rows[0].score_after);
            }
        }
    }

    #[test]
    fn empty_sweeps_are_rejected() {
        let mut config = tiny_config();
        config.runs = 0;
        assert!(monte_carlo(&config).is_err());
        let mut config = tiny_config();
        config.strategies.clear();
        assert!(monte_carlo(&config).is_err());
    }

    #[test]
    fn non_convergence_carries_run_identity() {
        let mut config = tiny_config();
        config.options.round_ceiling = Some(0);
        let err = monte_carlo(&config).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("seed 0"), "{message}");
        assert!(message.contains("strategy none"), "{message}");
    }

    #[test]
    fn csv_emission_has_headers_and_rows() {
        let config = SweepConfig {
            runs: 1,
            strategies: vec![StrategyKind::None],
            ..tiny_config()
        };
        let result = monte_carlo(&config).unwrap();
        let mut rows_csv = Vec::new();
        write_rows_csv(&result.rows, &mut rows_csv).unwrap();
        let text = String::from_utf8(rows_csv).unwrap();
        assert!(text.starts_with("seed,scenario_hash,strategy,arrival"));
        assert_eq!(text.lines().count(), 1 + result.rows.len());

        let mut agg_csv = Vec::new();
        write_aggregates_csv(&result.aggregates, &mut agg_csv).unwrap();
        let text = String::from_utf8(agg_csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("none"));
    }
}
