//! Bundle construction: each round, an agent greedily bids tasks into its
//! bundle until it hits capacity or runs out of tasks it can win.
//!
//! Bids are clamped to the agent's current lowest bundle bid so the bid
//! sequence along every bundle is non-increasing. Convergence to the
//! sequential-greedy solution relies on that diminishing-gains shape; the
//! clamp is a no-op whenever the raw insertion gains already diminish.

use std::collections::BTreeSet;

use crate::scoring::best_insertion;
use crate::state::AgentState;
use crate::types::{AgentId, Score, TaskId, TaskTable};

/// Whether to outbid the currently believed winner.
///
/// Outbidding requires a strictly greater bid; exact ties go to the lower
/// agent id. The same rule is used everywhere a bid comparison happens
/// (consensus conflicts, the sequential-greedy oracle), which is what makes
/// ties resolve identically across the team.
pub fn eligible_bid(
    bid: Score,
    current_bid: Score,
    own: AgentId,
    current_winner: Option<AgentId>,
) -> bool {
    bid > current_bid || (bid == current_bid && current_winner.is_none_or(|w| own < w))
}

/// Runs one bundle-build pass for `state` against the known task table,
/// carrying the previous bundle forward and appending new wins at the end.
/// Returns true if anything was added.
///
/// With `clamp` set, each new bid is capped at the agent's current lowest
/// bundle bid. Disabling the clamp stores raw insertion gains and forfeits
/// the convergence guarantee; it exists to show the clamp changes nothing
/// on instances whose raw gains already diminish.
///
/// Tasks in `locked` are not up for auction and are skipped as candidates.
/// Reset strategies that retain part of a converged allocation lock the
/// retained tasks for the rest of the episode: the time-discounted score is
/// not submodular, so a newly won task can raise an agent's gain for a
/// neighboring settled task above its standing bid and re-open it, which
/// would forfeit the strategies' response-time bounds.
pub fn build_bundle(
    state: &mut AgentState,
    tasks: &TaskTable,
    clamp: bool,
    locked: &BTreeSet<TaskId>,
) -> bool {
    let own = state.id();
    let mut changed = false;

    while state.bundle.len() < state.capacity() {
        let floor = state.bundle.last().map(|task| state.belief.bid(task));

        let mut best: Option<(Score, TaskId, usize)> = None;
        for task in tasks.iter() {
            if state.bundle.contains(task.id) || locked.contains(&task.id) {
                continue;
            }
            let insertion = best_insertion(&state.spec, &state.path, tasks, task.id)
                .expect("bundle candidates come from the task table");
            let bid = match (clamp, floor) {
                (true, Some(floor)) => insertion.gain.min(floor),
                _ => insertion.gain,
            };
            if bid <= Score::ZERO {
                continue;
            }
            if !eligible_bid(bid, state.belief.bid(task.id), own, state.belief.winner(task.id)) {
                continue;
            }
            // Ascending task-id iteration + strict improvement = lowest id
            // wins equal bids.
            if best.is_none_or(|(b, _, _)| bid > b) {
                best = Some((bid, task.id, insertion.index));
            }
        }

        let Some((bid, task, index)) = best else {
            break;
        };
        state.bundle.push(task);
        state.path.insert_at(index, task);
        state.belief.set_winner(task, own, bid);
        changed = true;
    }

    changed
}
