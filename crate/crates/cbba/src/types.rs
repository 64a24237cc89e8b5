//! Shared domain types: identifiers, planar geometry, scores, and the task
//! and agent descriptions every other module works against.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a task within one scenario.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of an agent within one scenario.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point in the plane, in scenario distance units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// A bid or path value in score units.
///
/// Scores are totally ordered and never NaN. `Score::NEG_INF` is the sentinel
/// for "no bid"; it compares below every finite score.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Score(f64);

impl Score {
    pub const ZERO: Score = Score(0.0);
    pub const NEG_INF: Score = Score(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "scores must never be NaN");
        Score(value)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn min(self, other: Score) -> Score {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == std::cmp::Ordering::Equal
    }
}

impl Eq for Score {}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        Score::new(self.0 + rhs.0)
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, rhs: Score) -> Score {
        Score::new(self.0 - rhs.0)
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, Add::add)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of one task: where it is, what it pays, and how fast that
/// payment decays with service time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: TaskId,
    pub position: Point,
    /// Static reward, >= 0.
    pub reward: f64,
    /// Time-discount factor per time unit, in (0, 1].
    pub discount: f64,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.reward >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "task {}: reward must be >= 0, got {}",
                self.id, self.reward
            )));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "task {}: discount must be in (0, 1], got {}",
                self.id, self.discount
            )));
        }
        Ok(())
    }
}

/// Description of one agent: start position, travel speed, and the maximum
/// number of tasks it may hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub id: AgentId,
    pub position: Point,
    /// Distance per time unit, > 0.
    pub speed: f64,
    /// Maximum path length, >= 1.
    pub capacity: usize,
}

impl AgentSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "agent {}: speed must be > 0, got {}",
                self.id, self.speed
            )));
        }
        if self.capacity < 1 {
            return Err(Error::InvalidParameter(format!(
                "agent {}: capacity must be >= 1",
                self.id
            )));
        }
        Ok(())
    }
}

/// The set of tasks currently known to the team, keyed by id.
///
/// Iteration order is ascending task id, which all tie-breaking rules rely on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskTable {
    tasks: BTreeMap<TaskId, TaskSpec>,
}

impl TaskTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_specs(specs: impl IntoIterator<Item = TaskSpec>) -> Result<Self> {
        let mut table = TaskTable::new();
        for spec in specs {
            table.insert(spec)?;
        }
        Ok(table)
    }

    /// Adds a task; ids must be unique within a scenario.
    pub fn insert(&mut self, spec: TaskSpec) -> Result<()> {
        spec.validate()?;
        let id = spec.id;
        if self.tasks.insert(id, spec).is_some() {
            return Err(Error::DuplicateTask(id));
        }
        Ok(())
    }

    pub fn get(&self, id: TaskId) -> Result<&TaskSpec> {
        self.tasks.get(&id).ok_or(Error::UnknownTask(id))
    }

    pub fn contains(&self, id: TaskId) -> bool {
        self.tasks.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TaskSpec> {
        self.tasks.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.tasks.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_ordering_puts_neg_inf_below_everything() {
        assert!(Score::NEG_INF < Score::new(-1.0e300));
        assert!(Score::NEG_INF < Score::ZERO);
        assert!(Score::new(0.5) < Score::new(0.7));
        assert_eq!(Score::new(0.5), Score::new(0.5));
        assert!(!Score::NEG_INF.is_finite());
        assert!(Score::ZERO.is_finite());
    }

    #[test]
    fn point_distance() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(3.0, 4.0);
        assert_eq!(a.distance(&b), 5.0);
        assert_eq!(a.distance(&a), 0.0);
    }

    #[test]
    fn task_table_rejects_duplicate_ids() {
        let task = |id| TaskSpec {
            id: TaskId(id),
            position: Point::new(0.0, 0.0),
            reward: 1.0,
            discount: 0.95,
        };
        let mut table = TaskTable::new();
        table.insert(task(1)).unwrap();
        assert!(matches!(
            table.insert(task(1)),
            Err(Error::DuplicateTask(TaskId(1)))
        ));
    }

    #[test]
    fn task_spec_validation() {
        let mut spec = TaskSpec {
            id: TaskId(0),
            position: Point::new(0.0, 0.0),
            reward: 1.0,
            discount: 0.95,
        };
        assert!(spec.validate().is_ok());
        spec.discount = 0.0;
        assert!(spec.validate().is_err());
        spec.discount = 1.0;
        assert!(spec.validate().is_ok());
        spec.reward = -0.1;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn ids_work_as_json_map_keys() {
        let mut map = BTreeMap::new();
        map.insert(TaskId(3), 7u32);
        let json = serde_json::to_string(&map).unwrap();
        assert_eq!(json, r#"{"3":7}"#);
        let back: BTreeMap<TaskId, u32> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, map);
    }
}
