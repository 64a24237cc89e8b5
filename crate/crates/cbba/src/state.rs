//! Per-agent working state: the execution path, the bid-ordered bundle, and
//! the belief lists (winners, winning bids, information timestamps) that the
//! consensus phase keeps synchronized across the team.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{AgentId, AgentSpec, Score, TaskId};

/// Ordered task sequence in execution order.
///
/// A path never contains duplicates; its length is capped by the owning
/// agent's capacity (enforced by the operations that grow it).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<TaskId>);

impl Path {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, task: TaskId) -> bool {
        self.0.contains(&task)
    }

    pub fn tasks(&self) -> &[TaskId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.0.iter().copied()
    }

    /// Inserts `task` at `index`, shifting later entries back.
    ///
    /// Panics if `index` is out of range or the task is already present;
    /// callers check eligibility before editing.
    pub fn insert_at(&mut self, index: usize, task: TaskId) {
        assert!(index <= self.0.len(), "insertion index out of range");
        assert!(!self.contains(task), "task {task} already in path");
        self.0.insert(index, task);
    }

    /// Removes `task` if present, preserving the order of the rest.
    /// Removing an absent task is a no-op.
    pub fn remove(&mut self, task: TaskId) -> bool {
        match self.0.iter().position(|&t| t == task) {
            Some(idx) => {
                self.0.remove(idx);
                true
            }
            None => false,
        }
    }
}

impl FromIterator<TaskId> for Path {
    fn from_iter<I: IntoIterator<Item = TaskId>>(iter: I) -> Self {
        Path(iter.into_iter().collect())
    }
}

/// Ordered task sequence in bid order: entry `n` was bid before entry `n+1`,
/// and stored bids are non-increasing along it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(Vec<TaskId>);

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, task: TaskId) -> bool {
        self.0.contains(&task)
    }

    pub fn tasks(&self) -> &[TaskId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.0.iter().copied()
    }

    pub fn get(&self, index: usize) -> Option<TaskId> {
        self.0.get(index).copied()
    }

    pub fn last(&self) -> Option<TaskId> {
        self.0.last().copied()
    }

    /// Appends a newly won task; bundles only ever grow at the end.
    pub fn push(&mut self, task: TaskId) {
        assert!(!self.contains(task), "task {task} already in bundle");
        self.0.push(task);
    }

    /// Removes `task` if present; absent tasks are a no-op.
    pub fn remove(&mut self, task: TaskId) -> bool {
        match self.0.iter().position(|&t| t == task) {
            Some(idx) => {
                self.0.remove(idx);
                true
            }
            None => false,
        }
    }

    /// Drops every entry at positions >= `index`, returning them in order.
    pub fn split_off(&mut self, index: usize) -> Vec<TaskId> {
        assert!(index <= self.0.len(), "bundle index out of range");
        self.0.split_off(index)
    }
}

impl FromIterator<TaskId> for Bundle {
    fn from_iter<I: IntoIterator<Item = TaskId>>(iter: I) -> Self {
        Bundle(iter.into_iter().collect())
    }
}

/// One agent's view of who wins each task, at what bid, and how fresh its
/// information about every teammate is.
///
/// Tasks absent from the winner map are believed unassigned; their implied
/// bid is `Score::NEG_INF`. Storing winner and bid together makes the
/// "no winner iff no bid" consistency rule structural.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    winners: BTreeMap<TaskId, (AgentId, Score)>,
    timestamps: BTreeMap<AgentId, u64>,
}

impl BeliefState {
    pub fn new(roster: impl IntoIterator<Item = AgentId>) -> Self {
        BeliefState {
            winners: BTreeMap::new(),
            timestamps: roster.into_iter().map(|id| (id, 0)).collect(),
        }
    }

    /// Believed winner of `task`, or `None` if unassigned.
    pub fn winner(&self, task: TaskId) -> Option<AgentId> {
        self.winners.get(&task).map(|&(agent, _)| agent)
    }

    /// Believed winning bid on `task`; `NEG_INF` when unassigned.
    pub fn bid(&self, task: TaskId) -> Score {
        self.winners
            .get(&task)
            .map(|&(_, bid)| bid)
            .unwrap_or(Score::NEG_INF)
    }

    pub fn entry(&self, task: TaskId) -> Option<(AgentId, Score)> {
        self.winners.get(&task).copied()
    }

    pub fn set_winner(&mut self, task: TaskId, agent: AgentId, bid: Score) {
        assert!(bid.is_finite(), "winning bids must be finite");
        self.winners.insert(task, (agent, bid));
    }

    /// Marks `task` unassigned, returning the previous entry if any.
    pub fn clear(&mut self, task: TaskId) -> Option<(AgentId, Score)> {
        self.winners.remove(&task)
    }

    /// All believed assignments, ascending by task id.
    pub fn winners(&self) -> &BTreeMap<TaskId, (AgentId, Score)> {
        &self.winners
    }

    /// Round of the freshest information held about `agent` (directly or
    /// relayed); 0 until anything is heard.
    pub fn timestamp(&self, agent: AgentId) -> u64 {
        self.timestamps.get(&agent).copied().unwrap_or(0)
    }

    pub fn set_timestamp(&mut self, agent: AgentId, round: u64) {
        self.timestamps.insert(agent, round);
    }

    pub fn raise_timestamp(&mut self, agent: AgentId, round: u64) {
        let entry = self.timestamps.entry(agent).or_insert(0);
        *entry = (*entry).max(round);
    }

    pub fn timestamps(&self) -> &BTreeMap<AgentId, u64> {
        &self.timestamps
    }
}

/// Complete per-agent state carried between rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub spec: AgentSpec,
    pub path: Path,
    pub bundle: Bundle,
    pub belief: BeliefState,
}

impl AgentState {
    pub fn new(spec: AgentSpec, roster: impl IntoIterator<Item = AgentId>) -> Self {
        AgentState {
            spec,
            path: Path::new(),
            bundle: Bundle::new(),
            belief: BeliefState::new(roster),
        }
    }

    pub fn id(&self) -> AgentId {
        self.spec.id
    }

    pub fn capacity(&self) -> usize {
        self.spec.capacity
    }

    /// Checks every structural invariant, returning a description of the
    /// first violation found. Used by tests and assignment validation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let id = self.id();
        if self.path.len() > self.capacity() {
            return Err(format!("agent {id}: path exceeds capacity"));
        }
        if self.bundle.len() != self.path.len() {
            return Err(format!("agent {id}: bundle and path lengths differ"));
        }
        for task in self.bundle.iter() {
            if !self.path.contains(task) {
                return Err(format!("agent {id}: bundled task {task} missing from path"));
            }
        }
        let mut prev = None;
        for task in self.bundle.iter() {
            match self.belief.entry(task) {
                Some((winner, bid)) if winner == id => {
                    if let Some(prev_bid) = prev {
                        if bid > prev_bid {
                            return Err(format!(
                                "agent {id}: bundle bids increase at task {task}"
                            ));
                        }
                    }
                    prev = Some(bid);
                }
                Some((winner, _)) => {
                    return Err(format!(
                        "agent {id}: bundled task {task} believed won by {winner}"
                    ));
                }
                None => {
                    return Err(format!(
                        "agent {id}: bundled task {task} has no recorded bid"
                    ));
                }
            }
        }
        Ok(())
    }
}
