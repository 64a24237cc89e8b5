//! Running one scenario end to end: converge on the initial tasks, then
//! inject each arrival once the team has settled, measuring rounds and
//! score movement per episode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::scenario::{Scenario, StrategyParams};
use crate::netsim::{EventLog, WorldState};
use crate::replan::{compute_n_reset, select_subteam, ResetStrategy, StrategyKind};
use crate::types::{Score, TaskId, TaskSpec};

/// Execution knobs for one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Per-episode round ceiling; None derives 10 * total tasks * diameter.
    pub round_ceiling: Option<u64>,
    /// Keep the full event log instead of the bounded diagnostic tail.
    pub record_events: bool,
    /// Also log every received snapshot (verbose).
    pub log_snapshots: bool,
    /// Cap bids at the agent's lowest bundle bid (leave on; see bundle
    /// module for what turning it off forfeits).
    pub dmg_clamp: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            round_ceiling: None,
            record_events: false,
            log_snapshots: false,
            dmg_clamp: true,
        }
    }
}

/// Measurements for one arrival episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalMetrics {
    /// 1-based arrival number.
    pub arrival_index: usize,
    pub task: TaskId,
    /// Rounds from injection to reconvergence.
    pub rounds: u64,
    pub score_before: f64,
    pub score_after: f64,
    /// score_after - score_before.
    pub delta: f64,
}

/// Measurements for a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Rounds to converge on the initial task set.
    pub initial_rounds: u64,
    pub initial_score: f64,
    pub arrivals: Vec<ArrivalMetrics>,
    /// Snapshots applied across the whole run.
    pub messages: u64,
}

impl RunMetrics {
    /// Total score gained over all arrivals.
    pub fn cumulative_delta(&self) -> f64 {
        self.arrivals.iter().map(|a| a.delta).sum()
    }

    pub fn final_score(&self) -> f64 {
        self.arrivals
            .last()
            .map(|a| a.score_after)
            .unwrap_or(self.initial_score)
    }
}

/// A finished run: its measurements and the final world for validation or
/// saving.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub metrics: RunMetrics,
    pub world: WorldState,
}

/// Builds the concrete reset strategy for one arrival from the scenario's
/// parameters. Partial-team derives its reset count from the response
/// budget (over the subteam diameter) when one is given.
pub fn build_strategy(
    kind: StrategyKind,
    params: &StrategyParams,
    world: &WorldState,
    arrival: &TaskSpec,
) -> Result<ResetStrategy> {
    match kind {
        StrategyKind::None => Ok(ResetStrategy::None),
        StrategyKind::Full => Ok(ResetStrategy::Full),
        StrategyKind::PartialLocal => {
            let per_agent = params
                .per_agent_reset
                .unwrap_or(params.n_reset / world.agents.len().max(1));
            Ok(ResetStrategy::PartialLocal {
                agent_reset_count: per_agent,
            })
        }
        StrategyKind::PartialTeam => {
            let subteam = params
                .subteam_size
                .map(|size| {
                    select_subteam(
                        &world.agent_specs(),
                        &world.graph,
                        arrival.position,
                        size,
                    )
                })
                .transpose()?;
            let count = match params.t_response {
                Some(budget) => {
                    let diameter = match &subteam {
                        Some(team) => team.diameter,
                        None => world.graph.diameter()?.max(1),
                    };
                    compute_n_reset(budget, diameter, params.round_duration)?
                }
                None => params.n_reset,
            };
            Ok(ResetStrategy::PartialTeam {
                team_reset_count: count,
                subteam,
            })
        }
    }
}

/// Runs `scenario` under `kind`: rounds until initial convergence, then one
/// reallocation episode per scheduled arrival. Exceeding the round ceiling
/// aborts with a non-convergence error carrying the recent event log.
pub fn run_experiment(
    scenario: &Scenario,
    kind: StrategyKind,
    options: &RunOptions,
) -> Result<ExperimentOutcome> {
    let mut world = scenario.build_world()?;
    world.dmg_clamp = options.dmg_clamp;
    if options.record_events {
        world.recorder = Some(EventLog::unbounded(options.log_snapshots));
    }

    let diameter = world.graph.diameter()?;
    let total_tasks = (scenario.tasks.len() + scenario.arrivals.len()) as u64;
    let ceiling = options
        .round_ceiling
        .unwrap_or_else(|| 10 * total_tasks.max(1) * diameter.max(1));

    // Strategies are inert before the first arrival, so the static phase is
    // identical for every kind.
    let initial_rounds =
        world.run_until_converged(&ResetStrategy::None, ceiling, "initial allocation")?;
    world.mark_converged();
    let initial_score = world.team_score()?.get();

    let mut arrivals = Vec::with_capacity(scenario.arrivals.len());
    let mut score_before = initial_score;
    for (index, task) in scenario.arrivals.iter().enumerate() {
        let params = &scenario.strategy[index];
        let strategy = build_strategy(kind, params, &world, task)?;
        world.inject_task(task.clone())?;
        let phase = format!("arrival {}", index + 1);
        let rounds = world.run_until_converged(&strategy, ceiling, &phase)?;
        world.mark_converged();
        let score_after = world.team_score()?.get();
        arrivals.push(ArrivalMetrics {
            arrival_index: index + 1,
            task: task.id,
            rounds,
            score_before,
            score_after,
            delta: score_after - score_before,
        });
        score_before = score_after;
    }

    Ok(ExperimentOutcome {
        metrics: RunMetrics {
            initial_rounds,
            initial_score,
            arrivals,
            messages: world.messages_sent,
        },
        world,
    })
}

/// Team-score movement between two converged worlds: after minus before.
pub fn score_delta(before: &WorldState, after: &WorldState) -> Result<Score> {
    Ok(after.team_score()? - before.team_score()?)
}

/// Convenience for propagating run identity into non-convergence errors.
pub(crate) fn tag_run(error: Error, seed: u64, kind: StrategyKind) -> Error {
    match error {
        Error::NonConvergence {
            rounds,
            ceiling,
            phase,
            disagreements,
            events,
        } => Error::NonConvergence {
            rounds,
            ceiling,
            phase: format!("seed {seed}, strategy {kind}, {phase}"),
            disagreements,
            events,
        },
        other => other,
    }
}
