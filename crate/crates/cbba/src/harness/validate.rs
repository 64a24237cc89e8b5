//! Assignment validation against the allocation constraints: per-agent
//! capacity, one winner per task, expected fill, and cross-agent agreement.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::netsim::WorldState;
use crate::types::TaskId;

/// Outcome of one constraint family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub passed: bool,
    /// False when the check's preconditions did not hold and it was skipped.
    pub checked: bool,
    /// Human-readable offender descriptions (empty when passed).
    pub offenders: Vec<String>,
}

impl CheckResult {
    fn pass() -> Self {
        CheckResult {
            passed: true,
            checked: true,
            offenders: Vec::new(),
        }
    }

    fn skipped() -> Self {
        CheckResult {
            passed: true,
            checked: false,
            offenders: Vec::new(),
        }
    }

    fn from_offenders(offenders: Vec<String>) -> Self {
        CheckResult {
            passed: offenders.is_empty(),
            checked: true,
            offenders,
        }
    }
}

/// Per-constraint report derived solely from a final world state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// No agent carries more tasks than its capacity.
    pub capacity: CheckResult,
    /// No task sits in more than one path.
    pub uniqueness: CheckResult,
    /// Exactly min(total capacity, task count) tasks are allocated; only
    /// checked when every reward is positive and the graph is connected.
    pub fill: CheckResult,
    /// All agents hold identical winner lists and every believed winner
    /// actually carries the task.
    pub agreement: CheckResult,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.capacity.passed
            && self.uniqueness.passed
            && self.fill.passed
            && self.agreement.passed
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in [
            ("capacity", &self.capacity),
            ("uniqueness", &self.uniqueness),
            ("fill", &self.fill),
            ("agreement", &self.agreement),
        ] {
            let verdict = if !check.checked {
                "skipped"
            } else if check.passed {
                "pass"
            } else {
                "FAIL"
            };
            writeln!(f, "{name:<11} {verdict}")?;
            for offender in &check.offenders {
                writeln!(f, "    {offender}")?;
            }
        }
        Ok(())
    }
}

/// Checks all four constraint families on a (nominally converged) world.
/// Failures are report entries, never errors.
pub fn validate_assignment(world: &WorldState) -> ValidationReport {
    let capacity = CheckResult::from_offenders(
        world
            .agents
            .values()
            .filter(|state| state.path.len() > state.capacity())
            .map(|state| {
                format!(
                    "agent {} holds {} tasks with capacity {}",
                    state.id(),
                    state.path.len(),
                    state.capacity()
                )
            })
            .collect(),
    );

    let mut holders: BTreeMap<TaskId, Vec<String>> = BTreeMap::new();
    for state in world.agents.values() {
        for task in state.path.iter() {
            holders
                .entry(task)
                .or_default()
                .push(state.id().to_string());
        }
    }
    let uniqueness = CheckResult::from_offenders(
        holders
            .iter()
            .filter(|(_, agents)| agents.len() > 1)
            .map(|(task, agents)| {
                format!("task {task} held by agents {}", agents.join(", "))
            })
            .collect(),
    );

    let all_rewards_positive = world.tasks.iter().all(|t| t.reward > 0.0);
    let fill = if all_rewards_positive && world.graph.is_connected() {
        let total_capacity: usize = world.agents.values().map(|s| s.capacity()).sum();
        let expected = total_capacity.min(world.tasks.len());
        let allocated = holders.len();
        if allocated == expected {
            CheckResult::pass()
        } else {
            CheckResult::from_offenders(vec![format!(
                "{allocated} tasks allocated, expected {expected}"
            )])
        }
    } else {
        CheckResult::skipped()
    };

    let mut offenders = Vec::new();
    let mut agents = world.agents.values();
    if let Some(first) = agents.next() {
        let reference = first.belief.winners();
        for state in agents {
            if state.belief.winners() != reference {
                let mut tasks: Vec<TaskId> =
                    reference.keys().chain(state.belief.winners().keys()).copied().collect();
                tasks.sort();
                tasks.dedup();
                for task in tasks {
                    if reference.get(&task) != state.belief.winners().get(&task) {
                        offenders.push(format!(
                            "agents {} and {} disagree on task {task}",
                            first.id(),
                            state.id()
                        ));
                    }
                }
            }
        }
    }
    for state in world.agents.values() {
        for (&task, &(winner, _)) in state.belief.winners() {
            let held = world
                .agents
                .get(&winner)
                .is_some_and(|w| w.path.contains(task));
            if !held {
                offenders.push(format!(
                    "agent {} believes {winner} wins task {task}, but it is not in that path",
                    state.id()
                ));
            }
        }
    }
    offenders.sort();
    offenders.dedup();
    let agreement = CheckResult::from_offenders(offenders);

    ValidationReport {
        capacity,
        uniqueness,
        fill,
        agreement,
    }
}
