//! Time-discounted path scoring and the single-task insertion search that
//! bundle construction bids with.
//!
//! A path through tasks j1, j2, ... scores `sum_j discount_j^tau_j * reward_j`
//! where `tau_j` is the cumulative travel time from the agent's start
//! position through the path prefix, at constant speed over Euclidean
//! distances. An empty path scores zero.

use crate::error::Result;
use crate::state::Path;
use crate::types::{AgentSpec, Score, TaskId, TaskTable};

/// Result of searching all insertion points for one candidate task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    /// Path index the candidate is best inserted at.
    pub index: usize,
    /// Score gain of inserting there: score(with) - score(without).
    pub gain: Score,
}

/// Scores `path` for `agent`: the sum of each task's reward discounted by
/// its arrival time.
pub fn path_score(agent: &AgentSpec, path: &Path, tasks: &TaskTable) -> Result<Score> {
    let mut total = 0.0;
    let mut elapsed = 0.0;
    let mut at = agent.position;
    for id in path.iter() {
        let task = tasks.get(id)?;
        elapsed += at.distance(&task.position) / agent.speed;
        total += task.discount.powf(elapsed) * task.reward;
        at = task.position;
    }
    Ok(Score::new(total))
}

/// Finds the insertion index for `candidate` that maximizes the score gain,
/// along with that gain. Ties go to the smallest index.
///
/// Panics if the candidate is already in the path or the path is at the
/// agent's capacity; callers filter those cases first.
pub fn best_insertion(
    agent: &AgentSpec,
    path: &Path,
    tasks: &TaskTable,
    candidate: TaskId,
) -> Result<Insertion> {
    assert!(
        !path.contains(candidate),
        "candidate {candidate} already in path"
    );
    assert!(
        path.len() < agent.capacity,
        "agent {} path is at capacity",
        agent.id
    );
    tasks.get(candidate)?;

    let base = path_score(agent, path, tasks)?;
    let mut best: Option<Insertion> = None;
    for index in 0..=path.len() {
        let mut extended = path.clone();
        extended.insert_at(index, candidate);
        let gain = path_score(agent, &extended, tasks)? - base;
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(Insertion { index, gain });
        }
    }
    Ok(best.expect("at least one insertion point exists"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::types::{AgentId, Point, TaskSpec};

    fn agent_at_origin(capacity: usize) -> AgentSpec {
        AgentSpec {
            id: AgentId(0),
            position: Point::new(0.0, 0.0),
            speed: 1.0,
            capacity,
        }
    }

    fn task_at_x(id: u32, x: f64) -> TaskSpec {
        TaskSpec {
            id: TaskId(id),
            position: Point::new(x, 0.0),
            reward: 1.0,
            discount: 0.95,
        }
    }

    fn table(specs: Vec<TaskSpec>) -> TaskTable {
        TaskTable::from_specs(specs).unwrap()
    }

    #[test]
    fn empty_path_scores_zero() {
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 5.0)]);
        let score = path_score(&agent, &Path::new(), &tasks).unwrap();
        assert_eq!(score, Score::ZERO);
    }

    #[test]
    fn task_at_agent_position_pays_full_reward() {
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 0.0)]);
        let path: Path = [TaskId(1)].into_iter().collect();
        let score = path_score(&agent, &path, &tasks).unwrap();
        assert_eq!(score.get(), 1.0);
    }

    #[test]
    fn collinear_two_task_path_discounts_cumulatively() {
        // Travel times 5 and 10 give 0.95^5 + 0.95^10.
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 5.0), task_at_x(2, 10.0)]);
        let path: Path = [TaskId(1), TaskId(2)].into_iter().collect();
        let score = path_score(&agent, &path, &tasks).unwrap().get();
        let expected = 0.95f64.powf(5.0) + 0.95f64.powf(10.0);
        assert!((score - expected).abs() < 1e-12);
        assert!((score - 1.3725178767).abs() < 1e-9);
    }

    #[test]
    fn unknown_task_is_an_input_error() {
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 5.0)]);
        let path: Path = [TaskId(9)].into_iter().collect();
        assert!(matches!(
            path_score(&agent, &path, &tasks),
            Err(Error::UnknownTask(TaskId(9)))
        ));
    }

    #[test]
    fn insertion_into_empty_path() {
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 5.0)]);
        let ins = best_insertion(&agent, &Path::new(), &tasks, TaskId(1)).unwrap();
        assert_eq!(ins.index, 0);
        assert!((ins.gain.get() - 0.95f64.powf(5.0)).abs() < 1e-12);
        assert!((ins.gain.get() - 0.7737809375).abs() < 1e-9);
    }

    #[test]
    fn closer_task_inserts_in_front() {
        // Inserting at the front leaves the existing task's arrival time
        // unchanged (collinear), so the front gain 0.95^5 beats the append
        // gain 0.95^15.
        let agent = agent_at_origin(4);
        let tasks = table(vec![task_at_x(1, 10.0), task_at_x(2, 5.0)]);
        let path: Path = [TaskId(1)].into_iter().collect();
        let ins = best_insertion(&agent, &path, &tasks, TaskId(2)).unwrap();
        assert_eq!(ins.index, 0);
        assert!((ins.gain.get() - 0.95f64.powf(5.0)).abs() < 1e-12);
    }

    #[test]
    fn equal_gains_break_to_lower_index() {
        // Candidate halfway between two mirrored tasks: inserting before or
        // after the existing task costs the same, so index 0 wins.
        let agent = agent_at_origin(4);
        let existing = TaskSpec {
            id: TaskId(1),
            position: Point::new(0.0, 0.0),
            reward: 1.0,
            discount: 0.95,
        };
        let candidate = TaskSpec {
            id: TaskId(2),
            position: Point::new(0.0, 0.0),
            reward: 1.0,
            discount: 0.95,
        };
        let tasks = table(vec![existing, candidate]);
        let path: Path = [TaskId(1)].into_iter().collect();
        let ins = best_insertion(&agent, &path, &tasks, TaskId(2)).unwrap();
        assert_eq!(ins.index, 0);
        assert_eq!(ins.gain.get(), 1.0);
    }

    #[test]
    fn gain_matches_direct_difference_at_every_index() {
        // Brute-force cross-check on an asymmetric 4-task layout.
        let agent = agent_at_origin(8);
        let specs = vec![
            task_at_x(1, 3.0),
            task_at_x(2, 11.0),
            TaskSpec {
                id: TaskId(3),
                position: Point::new(4.0, 7.0),
                reward: 2.0,
                discount: 0.9,
            },
            TaskSpec {
                id: TaskId(4),
                position: Point::new(-6.0, 2.0),
                reward: 0.5,
                discount: 0.99,
            },
            task_at_x(5, 1.0),
        ];
        let tasks = table(specs);
        let path: Path = [TaskId(1), TaskId(2), TaskId(3), TaskId(4)]
            .into_iter()
            .collect();
        let base = path_score(&agent, &path, &tasks).unwrap();
        let ins = best_insertion(&agent, &path, &tasks, TaskId(5)).unwrap();
        let mut best_gain = Score::NEG_INF;
        let mut best_index = 0;
        for index in 0..=path.len() {
            let mut extended = path.clone();
            extended.insert_at(index, TaskId(5));
            let gain = path_score(&agent, &extended, &tasks).unwrap() - base;
            if gain > best_gain {
                best_gain = gain;
                best_index = index;
            }
        }
        assert_eq!(ins.index, best_index);
        assert_eq!(ins.gain, best_gain);
    }

    #[test]
    fn visiting_nearer_first_never_scores_lower_on_collinear_tasks() {
        // For equal rewards and discounts, serving collinear tasks outward
        // dominates the reversed order: enumerate all 3-task layouts on a
        // small grid of distances.
        let agent = agent_at_origin(8);
        let distances = [1.0, 2.0, 5.0, 9.0, 14.0];
        for &a in &distances {
            for &b in &distances {
                for &c in &distances {
                    if !(a < b && b < c) {
                        continue;
                    }
                    let tasks =
                        table(vec![task_at_x(1, a), task_at_x(2, b), task_at_x(3, c)]);
                    let ascending: Path =
                        [TaskId(1), TaskId(2), TaskId(3)].into_iter().collect();
                    let descending: Path =
                        [TaskId(3), TaskId(2), TaskId(1)].into_iter().collect();
                    let up = path_score(&agent, &ascending, &tasks).unwrap();
                    let down = path_score(&agent, &descending, &tasks).unwrap();
                    assert!(up >= down, "a={a} b={b} c={c}");
                }
            }
        }
    }
}
