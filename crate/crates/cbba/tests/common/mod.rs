//! Independent oracles and shared invariant checks for the integration
//! suites. The scorers and enumerators here deliberately avoid the crate's
//! scoring and solver code paths so they can vouch for them.

use cbba::harness::validate_assignment;
use cbba::netsim::WorldState;
use cbba::types::{AgentId, AgentSpec, Point, TaskId, TaskSpec};

/// Time-discounted score of visiting `visits` in order from `start`,
/// computed directly from the definition.
pub fn oracle_sequence_score(start: Point, speed: f64, visits: &[&TaskSpec]) -> f64 {
    let mut total = 0.0;
    let mut elapsed = 0.0;
    let mut at = start;
    for task in visits {
        let dx = at.x - task.position.x;
        let dy = at.y - task.position.y;
        elapsed += (dx * dx + dy * dy).sqrt() / speed;
        total += task.discount.powf(elapsed) * task.reward;
        at = task.position;
    }
    total
}

/// Enumerates every insertion point for `candidate` and returns the best
/// (index, gain), ties to the smallest index.
pub fn oracle_best_insertion(
    agent: &AgentSpec,
    path: &[&TaskSpec],
    candidate: &TaskSpec,
) -> (usize, f64) {
    let base = oracle_sequence_score(agent.position, agent.speed, path);
    let mut best_index = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for index in 0..=path.len() {
        let mut extended: Vec<&TaskSpec> = path.to_vec();
        extended.insert(index, candidate);
        let gain = oracle_sequence_score(agent.position, agent.speed, &extended) - base;
        if gain > best_gain {
            best_gain = gain;
            best_index = index;
        }
    }
    (best_index, best_gain)
}

/// Step-by-step sequential greedy enumerator: at every step scans all
/// (agent, task, insertion point) triples, clamps each agent's bid at its
/// lowest previous bid, and takes the best with ties to the lower agent id
/// then lower task id. Returns the selection sequence.
pub fn oracle_sga(
    agents: &[AgentSpec],
    tasks: &[TaskSpec],
) -> Vec<(TaskId, AgentId, f64)> {
    let mut order: Vec<&AgentSpec> = agents.iter().collect();
    order.sort_by_key(|a| a.id);
    let mut paths: Vec<Vec<&TaskSpec>> = vec![Vec::new(); order.len()];
    let mut floors: Vec<Option<f64>> = vec![None; order.len()];
    let mut assigned = vec![false; tasks.len()];
    let mut sequence = Vec::new();

    loop {
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for (ai, agent) in order.iter().enumerate() {
            if paths[ai].len() >= agent.capacity {
                continue;
            }
            let base = oracle_sequence_score(agent.position, agent.speed, &paths[ai]);
            for (ti, task) in tasks.iter().enumerate() {
                if assigned[ti] {
                    continue;
                }
                for index in 0..=paths[ai].len() {
                    let mut extended = paths[ai].clone();
                    extended.insert(index, task);
                    let gain =
                        oracle_sequence_score(agent.position, agent.speed, &extended)
                            - base;
                    let bid = floors[ai].map_or(gain, |f| f.min(gain));
                    if bid <= 0.0 {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((b, ba, bt, _)) => {
                            bid > b
                                || (bid == b
                                    && (agent.id < order[ba].id
                                        || (agent.id == order[ba].id
                                            && task.id < tasks[bt].id)))
                        }
                    };
                    if better {
                        best = Some((bid, ai, ti, index));
                    }
                }
            }
        }
        let Some((bid, ai, ti, index)) = best else {
            break;
        };
        paths[ai].insert(index, &tasks[ti]);
        floors[ai] = Some(bid);
        assigned[ti] = true;
        sequence.push((tasks[ti].id, order[ai].id, bid));
    }
    sequence
}

/// The invariant bundle every converged run must satisfy: per-agent
/// structural invariants (bundle/path set equality, non-increasing bids,
/// own-win consistency), the four assignment constraints, and cross-agent
/// agreement.
pub fn check_run_invariants(world: &WorldState) {
    for state in world.agents.values() {
        state
            .check_invariants()
            .unwrap_or_else(|violation| panic!("{violation}"));
    }
    let report = validate_assignment(world);
    assert!(report.all_passed(), "assignment constraints violated:\n{report}");
    assert!(world.beliefs_agree(), "converged world has disagreeing beliefs");
}

/// One pass/fail line per acceptance criterion, printed as the suite runs.
pub fn criterion_line(number: u32, label: &str, detail: &str) {
    println!("[acceptance] criterion {number} ({label}): PASS — {detail}");
}
