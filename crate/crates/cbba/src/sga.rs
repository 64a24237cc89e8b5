//! Centralized sequential greedy assignment: repeatedly hand the globally
//! best (agent, task, insertion point) triple its task until nothing with
//! positive gain remains.
//!
//! This is the ground truth that converged decentralized runs are checked
//! against. It scores, clamps, and breaks ties exactly like bundle
//! construction does (highest gain, then lowest agent id, then lowest task
//! id, then lowest insertion index), so the equivalence holds for the
//! clamped score actually in use.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scoring::best_insertion;
use crate::state::Path;
use crate::types::{AgentId, AgentSpec, Score, TaskId, TaskTable};

/// One assignment step: the n-th selected task, its winner, and the bid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgaBid {
    pub task: TaskId,
    pub agent: AgentId,
    pub bid: Score,
}

/// A complete sequential-greedy solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgaSolution {
    /// Final task-to-agent assignment.
    pub assignment: BTreeMap<TaskId, AgentId>,
    /// Selection order with bids; non-increasing in bid.
    pub bids: Vec<SgaBid>,
    /// Each agent's path in execution order.
    pub paths: BTreeMap<AgentId, Path>,
}

impl SgaSolution {
    pub fn bid_for(&self, task: TaskId) -> Option<Score> {
        self.bids.iter().find(|b| b.task == task).map(|b| b.bid)
    }
}

/// Solves the static allocation for `agents` over `tasks`, honoring each
/// agent's own capacity.
pub fn solve(agents: &[AgentSpec], tasks: &TaskTable) -> Result<SgaSolution> {
    // Tie-breaking needs ascending agent-id scan order regardless of how
    // the caller ordered the slice.
    let mut agents: Vec<&AgentSpec> = agents.iter().collect();
    agents.sort_by_key(|a| a.id);
    let mut paths: BTreeMap<AgentId, Path> =
        agents.iter().map(|a| (a.id, Path::new())).collect();
    // Per-agent clamp floor: the agent's last (lowest) bid so far.
    let mut floors: BTreeMap<AgentId, Option<Score>> =
        agents.iter().map(|a| (a.id, None)).collect();
    let mut assignment = BTreeMap::new();
    let mut bids = Vec::new();

    loop {
        let mut best: Option<(Score, AgentId, TaskId, usize)> = None;
        for &agent in &agents {
            let path = &paths[&agent.id];
            if path.len() >= agent.capacity {
                continue;
            }
            let floor = floors[&agent.id];
            for task in tasks.iter() {
                if assignment.contains_key(&task.id) {
                    continue;
                }
                let insertion = best_insertion(agent, path, tasks, task.id)?;
                let bid = match floor {
                    Some(floor) => insertion.gain.min(floor),
                    None => insertion.gain,
                };
                if bid <= Score::ZERO {
                    continue;
                }
                // Agents ascend, tasks ascend: strict improvement keeps the
                // lowest (agent, task) pair on equal bids.
                if best.is_none_or(|(b, _, _, _)| bid > b) {
                    best = Some((bid, agent.id, task.id, insertion.index));
                }
            }
        }

        let Some((bid, agent, task, index)) = best else {
            break;
        };
        paths.get_mut(&agent).unwrap().insert_at(index, task);
        floors.insert(agent, Some(bid));
        assignment.insert(task, agent);
        bids.push(SgaBid { task, agent, bid });
    }

    debug_assert!(
        bids.windows(2).all(|w| w[0].bid >= w[1].bid),
        "greedy bid sequence must be non-increasing"
    );
    Ok(SgaSolution {
        assignment,
        bids,
        paths,
    })
}
