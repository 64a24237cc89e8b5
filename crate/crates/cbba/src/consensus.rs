//! Conflict resolution between an agent's beliefs and a neighbor's broadcast.
//!
//! For every task the two parties disagree on, the receiver either adopts the
//! sender's entry (update), marks the task unassigned (reset), or keeps its
//! own view (leave). Third-party claims are arbitrated by information
//! timestamps: a claim about agent `m` is only trusted from whoever has
//! heard from `m` more recently. If the receiver loses a task it holds, the
//! bundle suffix bid after that task is forfeited too, since those bids
//! assumed the lost task stayed in the path.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::state::AgentState;
use crate::types::{AgentId, Score, TaskId};

/// Immutable copy of the lists an agent broadcasts each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub sender: AgentId,
    /// Believed winner and bid per assigned task.
    pub winners: BTreeMap<TaskId, (AgentId, Score)>,
    /// Freshest round of information held about each agent.
    pub timestamps: BTreeMap<AgentId, u64>,
}

impl BeliefSnapshot {
    pub fn capture(state: &AgentState) -> Self {
        BeliefSnapshot {
            sender: state.id(),
            winners: state.belief.winners().clone(),
            timestamps: state.belief.timestamps().clone(),
        }
    }
}

/// One belief-table edit made while merging a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefChange {
    pub task: TaskId,
    pub previous: Option<(AgentId, Score)>,
    pub current: Option<(AgentId, Score)>,
}

/// What applying one snapshot did to the receiver.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MergeOutcome {
    /// True when winners, bids, bundle, or path changed. Timestamp
    /// refreshes alone do not count: they happen every round and would mask
    /// fixed-point detection.
    pub changed: bool,
    /// Tasks dropped from the receiver's bundle, in former bundle order.
    pub released: Vec<TaskId>,
    /// Belief edits in ascending task order, including release-induced ones.
    pub changes: Vec<BeliefChange>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Action {
    Update,
    Reset,
    Leave,
}

fn stamp(timestamps: &BTreeMap<AgentId, u64>, agent: AgentId) -> u64 {
    timestamps.get(&agent).copied().unwrap_or(0)
}

/// Whether claim `a` (bid, claimed winner) beats claim `b` under
/// strict-inequality bidding with the lower-id tie-break.
fn beats(a: (Score, AgentId), b: (Score, AgentId)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// The decision table for one task, given the sender's entry (`theirs`) and
/// the receiver's (`mine`).
fn resolve(
    me: AgentId,
    sender: AgentId,
    theirs: Option<(AgentId, Score)>,
    mine: Option<(AgentId, Score)>,
    their_stamps: &BTreeMap<AgentId, u64>,
    my_stamps: &BTreeMap<AgentId, u64>,
) -> Action {
    use Action::*;
    let fresher = |agent: AgentId| stamp(their_stamps, agent) > stamp(my_stamps, agent);
    let staler = |agent: AgentId| stamp(my_stamps, agent) > stamp(their_stamps, agent);

    match theirs {
        // The sender claims the task for itself.
        Some((claimed, their_bid)) if claimed == sender => match mine {
            Some((winner, my_bid)) if winner == me => {
                if beats((their_bid, sender), (my_bid, me)) {
                    Update
                } else {
                    Leave
                }
            }
            Some((winner, _)) if winner == sender => Update,
            Some((winner, my_bid)) => {
                if fresher(winner) || beats((their_bid, sender), (my_bid, winner)) {
                    Update
                } else {
                    Leave
                }
            }
            None => Update,
        },

        // The sender believes the receiver wins.
        Some((claimed, _)) if claimed == me => match mine {
            Some((winner, _)) if winner == me => Leave,
            Some((winner, _)) if winner == sender => Reset,
            Some((winner, _)) => {
                if fresher(winner) {
                    Reset
                } else {
                    Leave
                }
            }
            None => Leave,
        },

        // The sender believes some third agent wins.
        Some((third, their_bid)) => match mine {
            Some((winner, my_bid)) if winner == me => {
                if fresher(third) && beats((their_bid, third), (my_bid, me)) {
                    Update
                } else {
                    Leave
                }
            }
            Some((winner, _)) if winner == sender => {
                if fresher(third) {
                    Update
                } else {
                    Reset
                }
            }
            Some((winner, _)) if winner == third => {
                if fresher(third) {
                    Update
                } else {
                    Leave
                }
            }
            Some((other, my_bid)) => {
                if fresher(third) && (fresher(other) || beats((their_bid, third), (my_bid, other))) {
                    Update
                } else if fresher(other) && staler(third) {
                    Reset
                } else {
                    Leave
                }
            }
            None => {
                if fresher(third) {
                    Update
                } else {
                    Leave
                }
            }
        },

        // The sender believes nobody wins.
        None => match mine {
            Some((winner, _)) if winner == me => Leave,
            Some((winner, _)) if winner == sender => Update,
            Some((winner, _)) => {
                if fresher(winner) {
                    Update
                } else {
                    Leave
                }
            }
            None => Leave,
        },
    }
}

/// Merges a neighbor's snapshot into the receiver's beliefs at `round`.
///
/// Applies the decision table to every task either party has an opinion on,
/// refreshes timestamps, and releases the receiver's bundle suffix starting
/// at the earliest lost task, if any.
pub fn apply_message(receiver: &mut AgentState, msg: &BeliefSnapshot, round: u64) -> MergeOutcome {
    let me = receiver.id();
    let sender = msg.sender;
    assert_ne!(me, sender, "agents do not message themselves");

    let mut contested: BTreeSet<TaskId> =
        receiver.belief.winners().keys().copied().collect();
    contested.extend(msg.winners.keys().copied());

    let mut changes = Vec::new();
    for task in contested {
        let theirs = msg.winners.get(&task).copied();
        let mine = receiver.belief.entry(task);
        let action = resolve(
            me,
            sender,
            theirs,
            mine,
            &msg.timestamps,
            receiver.belief.timestamps(),
        );
        let next = match action {
            Action::Update => theirs,
            Action::Reset => None,
            Action::Leave => mine,
        };
        if next != mine {
            match next {
                Some((agent, bid)) => receiver.belief.set_winner(task, agent, bid),
                None => {
                    receiver.belief.clear(task);
                }
            }
            changes.push(BeliefChange {
                task,
                previous: mine,
                current: next,
            });
        }
    }

    receiver.belief.set_timestamp(sender, round);
    for (&agent, &stamp) in &msg.timestamps {
        if agent != sender && agent != me {
            receiver.belief.raise_timestamp(agent, stamp);
        }
    }
    receiver.belief.set_timestamp(me, round);

    let lost = receiver
        .bundle
        .iter()
        .position(|task| receiver.belief.winner(task) != Some(me));
    let mut released = Vec::new();
    if let Some(index) = lost {
        // Record the belief clears the release is about to make (the lost
        // task itself keeps whatever the table assigned it).
        for task in receiver.bundle.tasks()[index + 1..].iter().copied() {
            if let Some(previous) = receiver.belief.entry(task) {
                changes.push(BeliefChange {
                    task,
                    previous: Some(previous),
                    current: None,
                });
            }
        }
        released = release_from(receiver, index);
    }

    MergeOutcome {
        changed: !changes.is_empty() || !released.is_empty(),
        released,
        changes,
    }
}

/// Forfeits the bundle suffix starting at `index`: those tasks leave the
/// bundle and path, and every entry strictly after `index` has its belief
/// reset to unassigned. The entry at `index` itself keeps whatever belief
/// conflict resolution assigned it. Returns the released ids in former
/// bundle order.
pub fn release_from(state: &mut AgentState, index: usize) -> Vec<TaskId> {
    assert!(index < state.bundle.len(), "release index out of range");
    let released = state.bundle.split_off(index);
    for &task in &released {
        state.path.remove(task);
    }
    for &task in &released[1..] {
        state.belief.clear(task);
    }
    released
}
