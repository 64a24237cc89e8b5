//! Reset strategies applied at the start of bundle building while the team
//! reallocates after a task arrival.
//!
//! Four strategies are supported: keep everything (none), drop everything
//! (full), drop each agent's own lowest-bid tasks (partial local), or drop
//! the team-wide lowest-bid tasks chosen identically by every agent from the
//! converged bid list (partial team). Partial team applies once, on the
//! round the new task is announced; the others apply every round until the
//! team reconverges.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CommGraph;
use crate::state::{AgentState, BeliefState};
use crate::types::{AgentId, AgentSpec, Point, Score, TaskId};

/// A reset strategy, fully parameterized for one reallocation episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ResetStrategy {
    /// Keep previous allocations; new tasks only fit into spare capacity.
    None,
    /// Wipe allocations and beliefs once, on the arrival round, making the
    /// episode a fresh solve of the enlarged problem.
    Full,
    /// Drop each agent's `agent_reset_count` lowest-bid tasks every round.
    PartialLocal { agent_reset_count: usize },
    /// Drop the `team_reset_count` lowest-bid tasks across the team, once,
    /// on the arrival round. With a subteam set, only tasks won by subteam
    /// members qualify.
    PartialTeam {
        team_reset_count: usize,
        subteam: Option<Subteam>,
    },
}

impl ResetStrategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            ResetStrategy::None => StrategyKind::None,
            ResetStrategy::Full => StrategyKind::Full,
            ResetStrategy::PartialLocal { .. } => StrategyKind::PartialLocal,
            ResetStrategy::PartialTeam { .. } => StrategyKind::PartialTeam,
        }
    }
}

/// Strategy selector without episode parameters; what the CLI and sweep
/// configuration name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    None,
    Full,
    PartialLocal,
    PartialTeam,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::None,
        StrategyKind::Full,
        StrategyKind::PartialLocal,
        StrategyKind::PartialTeam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::None => "none",
            StrategyKind::Full => "full",
            StrategyKind::PartialLocal => "partial-local",
            StrategyKind::PartialTeam => "partial-team",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(StrategyKind::None),
            "full" => Ok(StrategyKind::Full),
            "partial-local" => Ok(StrategyKind::PartialLocal),
            "partial-team" => Ok(StrategyKind::PartialTeam),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy '{other}' (expected none, full, partial-local, partial-team)"
            ))),
        }
    }
}

/// The agents participating in a team replan, with the hop diameter of the
/// communication subgraph they induce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subteam {
    pub members: BTreeSet<AgentId>,
    pub diameter: u64,
}

/// Leaves the state untouched; new tasks are bid into spare capacity only.
pub fn reset_none(_state: &mut AgentState) {}

/// Empties the bundle and path and wipes the whole winner list, own wins
/// and other agents' alike. With every agent doing this once when a new
/// task is announced, the episode is a from-scratch solve of the enlarged
/// problem. Wiping again on later rounds would erase the consensus being
/// rebuilt and the team would never settle, so this fires only on the
/// arrival round.
pub fn reset_full(state: &mut AgentState) {
    let known: Vec<TaskId> = state.belief.winners().keys().copied().collect();
    for task in known {
        state.belief.clear(task);
    }
    for task in state.bundle.split_off(0) {
        state.path.remove(task);
    }
    debug_assert!(state.path.is_empty());
}

/// Drops the last `count` bundle entries (the lowest bids, by the
/// non-increasing bid invariant) from bundle and path, clearing their local
/// beliefs. `count` larger than the bundle behaves like a full reset of the
/// agent's own tasks.
pub fn reset_partial_local(state: &mut AgentState, count: usize) {
    let keep = state.bundle.len().saturating_sub(count);
    for task in state.bundle.split_off(keep) {
        state.belief.clear(task);
        state.path.remove(task);
    }
}

/// Number of tasks a response budget buys: `floor(budget / (diameter *
/// round_duration))`, clamped at zero.
pub fn compute_n_reset(response_budget: f64, diameter: u64, round_duration: f64) -> Result<usize> {
    if diameter == 0 {
        return Err(Error::InvalidParameter(
            "subteam diameter must be >= 1".into(),
        ));
    }
    if !(round_duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "round duration must be > 0, got {round_duration}"
        )));
    }
    let quotient = response_budget / (diameter as f64 * round_duration);
    Ok(quotient.floor().max(0.0) as usize)
}

/// The `count` allocated tasks with the lowest believed bids, ties broken by
/// lower task id. With a subteam, only tasks whose believed winner is a
/// member qualify. Because every agent calls this on the same converged
/// belief, all agents compute the identical set with no extra communication.
pub fn team_reset_set(
    belief: &BeliefState,
    count: usize,
    subteam: Option<&Subteam>,
) -> BTreeSet<TaskId> {
    let mut candidates: Vec<(Score, TaskId)> = belief
        .winners()
        .iter()
        .filter(|(_, (winner, _))| {
            subteam.is_none_or(|team| team.members.contains(winner))
        })
        .map(|(&task, &(_, bid))| (bid, task))
        .collect();
    candidates.sort();
    candidates
        .into_iter()
        .take(count)
        .map(|(_, task)| task)
        .collect()
}

/// Removes every task in `reset` from the agent's bundle and path (where
/// present) and clears its belief for all of them, including tasks it
/// believes other agents win.
pub fn reset_partial_team(state: &mut AgentState, reset: &BTreeSet<TaskId>) {
    for &task in reset {
        state.bundle.remove(task);
        state.path.remove(task);
        state.belief.clear(task);
    }
}

/// Picks the `size` agents nearest the new task, then expands the selection
/// along shortest communication paths until it induces a connected
/// subgraph. A singleton subteam reports diameter 1 (one broadcast round).
pub fn select_subteam(
    agents: &[AgentSpec],
    graph: &CommGraph,
    task_position: Point,
    size: usize,
) -> Result<Subteam> {
    if size == 0 {
        return Err(Error::InvalidParameter("subteam size must be >= 1".into()));
    }
    if !graph.is_connected() {
        return Err(Error::DisconnectedGraph);
    }

    let mut by_distance: Vec<(f64, AgentId)> = agents
        .iter()
        .map(|a| (a.position.distance(&task_position), a.id))
        .collect();
    by_distance.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let seed = by_distance
        .first()
        .ok_or_else(|| Error::InvalidParameter("no agents to select from".into()))?
        .1;
    let mut members: BTreeSet<AgentId> = by_distance
        .iter()
        .take(size.min(by_distance.len()))
        .map(|&(_, id)| id)
        .collect();

    // Splice each member onto the seed along a shortest path so the induced
    // subgraph is connected.
    let parents = graph.bfs_parents(seed)?;
    for member in members.clone() {
        let mut at = member;
        while at != seed {
            let parent = parents[&at];
            members.insert(parent);
            at = parent;
        }
    }

    let induced = graph.induced(&members);
    let diameter = if members.len() == 1 {
        1
    } else {
        induced.diameter()?
    };
    Ok(Subteam { members, diameter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::CommGraph;
    use crate::types::Score;

    fn t(id: u32) -> TaskId {
        TaskId(id)
    }

    fn a(id: u32) -> AgentId {
        AgentId(id)
    }

    fn loaded_agent(bundle: &[(u32, f64)]) -> AgentState {
        let spec = AgentSpec {
            id: a(0),
            position: Point::new(0.0, 0.0),
            speed: 1.0,
            capacity: 8,
        };
        let mut state = AgentState::new(spec, [a(0), a(1)]);
        for &(task, bid) in bundle {
            state.bundle.push(t(task));
            state.path.insert_at(state.path.len(), t(task));
            state.belief.set_winner(t(task), a(0), Score::new(bid));
        }
        state
    }

    #[test]
    fn reset_none_is_identity() {
        let mut state = loaded_agent(&[(1, 0.9), (2, 0.5)]);
        let before = state.clone();
        reset_none(&mut state);
        assert_eq!(state, before);
    }

    #[test]
    fn reset_full_wipes_allocations_and_beliefs() {
        let mut state = loaded_agent(&[(1, 0.9), (2, 0.5)]);
        state.belief.set_winner(t(7), a(1), Score::new(0.8));
        reset_full(&mut state);
        assert!(state.bundle.is_empty());
        assert!(state.path.is_empty());
        assert_eq!(state.belief.entry(t(1)), None);
        assert_eq!(state.belief.entry(t(2)), None);
        assert_eq!(state.belief.entry(t(7)), None);
    }

    #[test]
    fn reset_full_on_empty_state_is_identity() {
        let mut state = loaded_agent(&[]);
        let before = state.clone();
        reset_full(&mut state);
        assert_eq!(state, before);
    }

    #[test]
    fn partial_local_drops_the_bundle_tail() {
        let mut state = loaded_agent(&[(3, 0.9), (7, 0.7), (2, 0.5), (9, 0.3)]);
        reset_partial_local(&mut state, 2);
        assert_eq!(state.bundle.tasks(), &[t(3), t(7)]);
        assert_eq!(state.path.tasks(), &[t(3), t(7)]);
        assert_eq!(state.belief.entry(t(2)), None);
        assert_eq!(state.belief.entry(t(9)), None);
        assert!(state.belief.entry(t(3)).is_some());
    }

    #[test]
    fn partial_local_zero_is_identity() {
        let mut state = loaded_agent(&[(1, 0.9)]);
        let before = state.clone();
        reset_partial_local(&mut state, 0);
        assert_eq!(state, before);
    }

    #[test]
    fn partial_local_beyond_bundle_matches_full_reset_of_own_tasks() {
        let mut partial = loaded_agent(&[(1, 0.9), (2, 0.5)]);
        let mut full = partial.clone();
        reset_partial_local(&mut partial, 99);
        reset_full(&mut full);
        assert_eq!(partial, full);
    }

    #[test]
    fn n_reset_arithmetic() {
        assert_eq!(compute_n_reset(24.0, 3, 1.0).unwrap(), 8);
        assert_eq!(compute_n_reset(5.0, 2, 1.0).unwrap(), 2);
        assert_eq!(compute_n_reset(0.0, 3, 1.0).unwrap(), 0);
        assert!(compute_n_reset(5.0, 0, 1.0).is_err());
        assert!(compute_n_reset(5.0, 2, 0.0).is_err());
        assert!(compute_n_reset(5.0, 2, -1.0).is_err());
    }

    #[test]
    fn team_reset_takes_lowest_bids() {
        let mut belief = BeliefState::new([a(0), a(1)]);
        belief.set_winner(t(1), a(0), Score::new(0.9));
        belief.set_winner(t(2), a(1), Score::new(0.5));
        belief.set_winner(t(3), a(0), Score::new(0.7));
        belief.set_winner(t(4), a(1), Score::new(0.3));
        let set = team_reset_set(&belief, 2, None);
        assert_eq!(set, [t(4), t(2)].into_iter().collect());
    }

    #[test]
    fn team_reset_respects_subteam_ownership() {
        let mut belief = BeliefState::new([a(0), a(1)]);
        belief.set_winner(t(1), a(0), Score::new(0.9));
        belief.set_winner(t(2), a(1), Score::new(0.5));
        belief.set_winner(t(3), a(0), Score::new(0.7));
        belief.set_winner(t(4), a(1), Score::new(0.3));
        let subteam = Subteam {
            members: [a(0)].into_iter().collect(),
            diameter: 1,
        };
        let set = team_reset_set(&belief, 2, Some(&subteam));
        assert_eq!(set, [t(3), t(1)].into_iter().collect());
    }

    #[test]
    fn team_reset_zero_is_empty() {
        let mut belief = BeliefState::new([a(0)]);
        belief.set_winner(t(1), a(0), Score::new(0.9));
        assert!(team_reset_set(&belief, 0, None).is_empty());
    }

    #[test]
    fn team_reset_ties_break_to_lower_task_id() {
        let mut belief = BeliefState::new([a(0)]);
        belief.set_winner(t(5), a(0), Score::new(0.4));
        belief.set_winner(t(2), a(0), Score::new(0.4));
        belief.set_winner(t(9), a(0), Score::new(0.9));
        let set = team_reset_set(&belief, 1, None);
        assert_eq!(set, [t(2)].into_iter().collect());
    }

    #[test]
    fn identical_beliefs_compute_identical_reset_sets() {
        let mut belief = BeliefState::new([a(0), a(1)]);
        belief.set_winner(t(1), a(0), Score::new(0.6));
        belief.set_winner(t(2), a(1), Score::new(0.2));
        let twin = belief.clone();
        assert_eq!(team_reset_set(&belief, 1, None), team_reset_set(&twin, 1, None));
    }

    #[test]
    fn partial_team_reset_clears_members_and_beliefs() {
        let mut state = loaded_agent(&[(1, 0.9), (2, 0.5), (3, 0.3)]);
        state.belief.set_winner(t(8), a(1), Score::new(0.4));
        let reset: BTreeSet<TaskId> = [t(2), t(8)].into_iter().collect();
        reset_partial_team(&mut state, &reset);
        assert_eq!(state.bundle.tasks(), &[t(1), t(3)]);
        assert_eq!(state.path.tasks(), &[t(1), t(3)]);
        assert_eq!(state.belief.entry(t(2)), None);
        assert_eq!(state.belief.entry(t(8)), None);
        assert!(state.belief.entry(t(1)).is_some());
        assert!(state.belief.entry(t(3)).is_some());
    }

    #[test]
    fn partial_team_reset_empty_set_is_identity() {
        let mut state = loaded_agent(&[(1, 0.9)]);
        let before = state.clone();
        reset_partial_team(&mut state, &BTreeSet::new());
        assert_eq!(state, before);
    }

    #[test]
    fn partial_team_reset_on_non_owner_only_clears_beliefs() {
        let mut state = loaded_agent(&[(1, 0.9)]);
        state.belief.set_winner(t(5), a(1), Score::new(0.4));
        let reset: BTreeSet<TaskId> = [t(5)].into_iter().collect();
        reset_partial_team(&mut state, &reset);
        assert_eq!(state.bundle.tasks(), &[t(1)]);
        assert_eq!(state.belief.entry(t(5)), None);
    }

    fn line_agents(n: u32) -> Vec<AgentSpec> {
        (0..n)
            .map(|i| AgentSpec {
                id: a(i),
                position: Point::new(i as f64 * 10.0, 0.0),
                speed: 1.0,
                capacity: 4,
            })
            .collect()
    }

    #[test]
    fn subteam_of_whole_team_has_graph_diameter() {
        let agents = line_agents(4);
        let graph = CommGraph::line(agents.iter().map(|x| x.id)).unwrap();
        let subteam = select_subteam(&agents, &graph, Point::new(0.0, 0.0), 4).unwrap();
        assert_eq!(subteam.members.len(), 4);
        assert_eq!(subteam.diameter, 3);
    }

    #[test]
    fn singleton_subteam_has_diameter_one() {
        let agents = line_agents(4);
        let graph = CommGraph::line(agents.iter().map(|x| x.id)).unwrap();
        let subteam = select_subteam(&agents, &graph, Point::new(32.0, 0.0), 1).unwrap();
        assert_eq!(subteam.members, [a(3)].into_iter().collect());
        assert_eq!(subteam.diameter, 1);
    }

    #[test]
    fn subteam_picks_nearest_connected_pair() {
        // Task near the far end of a 4-agent line: the two nearest agents
        // are adjacent, so no expansion is needed and the diameter is 1.
        let agents = line_agents(4);
        let graph = CommGraph::line(agents.iter().map(|x| x.id)).unwrap();
        let subteam = select_subteam(&agents, &graph, Point::new(28.0, 0.0), 2).unwrap();
        assert_eq!(subteam.members, [a(2), a(3)].into_iter().collect());
        assert_eq!(subteam.diameter, 1);
    }

    #[test]
    fn subteam_expands_along_the_graph_until_connected() {
        // Agents 0 and 3 are nearest the task but sit at opposite ends of
        // the line; the path between them must be pulled in.
        let agents = vec![
            AgentSpec { id: a(0), position: Point::new(0.0, 0.0), speed: 1.0, capacity: 4 },
            AgentSpec { id: a(1), position: Point::new(0.0, 50.0), speed: 1.0, capacity: 4 },
            AgentSpec { id: a(2), position: Point::new(0.0, 50.0), speed: 1.0, capacity: 4 },
            AgentSpec { id: a(3), position: Point::new(1.0, 0.0), speed: 1.0, capacity: 4 },
        ];
        let graph = CommGraph::line(agents.iter().map(|x| x.id)).unwrap();
        let subteam = select_subteam(&agents, &graph, Point::new(0.5, 0.0), 2).unwrap();
        assert_eq!(subteam.members, (0..4).map(a).collect());
        assert_eq!(subteam.diameter, 3);
    }
}
