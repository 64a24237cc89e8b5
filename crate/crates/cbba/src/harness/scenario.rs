//! Reproducible world descriptions: generation from a seed, JSON
//! persistence, and construction of the simulated world.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path as FsPath;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CommGraph, TopologySpec};
use crate::netsim::WorldState;
use crate::types::{AgentId, AgentSpec, Point, TaskId, TaskSpec, TaskTable};

pub const SCENARIO_VERSION: u32 = 1;

/// Reset-strategy knobs for one arrival episode. Which strategy kind runs
/// is chosen per experiment; these parameterize it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyParams {
    /// Team-wide number of tasks to release (partial strategies).
    #[serde(default)]
    pub n_reset: usize,
    /// Per-agent release count for partial-local; defaults to
    /// n_reset / agent count.
    #[serde(default)]
    pub per_agent_reset: Option<usize>,
    /// Response-time budget; when set, n_reset is derived from it and the
    /// (sub)team diameter instead of taken from `n_reset`.
    #[serde(default)]
    pub t_response: Option<f64>,
    /// Wall-clock duration of one communication round.
    #[serde(default = "default_round_duration")]
    pub round_duration: f64,
    /// Restrict partial-team replanning to the closest such subteam.
    #[serde(default)]
    pub subteam_size: Option<usize>,
}

fn default_round_duration() -> f64 {
    1.0
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            n_reset: 0,
            per_agent_reset: None,
            t_response: None,
            round_duration: 1.0,
            subteam_size: None,
        }
    }
}

/// A complete, replayable experiment description. Identical scenarios yield
/// identical traces; agents plan from their listed start positions for
/// every scoring, and positions stay fixed for the scenario's lifetime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub seed: u64,
    pub agents: Vec<AgentSpec>,
    pub tasks: Vec<TaskSpec>,
    /// Tasks injected one at a time, each once the team has reconverged.
    pub arrivals: Vec<TaskSpec>,
    pub topology: TopologySpec,
    /// One parameter set per arrival.
    pub strategy: Vec<StrategyParams>,
}

/// Knobs for scenario generation. The default is the eight-agent,
/// eighty-task vehicle-routing setup with eight sequential arrivals; the
/// `constrained` preset lowers capacity so slack is scarce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n_agents: usize,
    pub n_tasks: usize,
    pub n_arrivals: usize,
    /// Side length of the square working area.
    pub area: f64,
    /// Uniform path capacity; None derives
    /// ceil((n_tasks + n_arrivals) / n_agents) + 1 so capacity is slack.
    pub capacity: Option<usize>,
    pub speed: f64,
    /// Time-discount factor per time unit.
    pub discount: f64,
    pub reward: f64,
    pub topology: TopologySpec,
    pub strategy: StrategyParams,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n_agents: 8,
            n_tasks: 80,
            n_arrivals: 8,
            area: 100.0,
            capacity: None,
            speed: 1.0,
            discount: 0.95,
            reward: 1.0,
            topology: TopologySpec::Complete,
            strategy: StrategyParams {
                n_reset: 24,
                ..StrategyParams::default()
            },
        }
    }
}

impl GenParams {
    /// Same setup with capacity tight enough that agents run out of slack.
    pub fn constrained() -> Self {
        GenParams {
            capacity: Some(10),
            ..GenParams::default()
        }
    }

    pub fn effective_capacity(&self) -> usize {
        self.capacity.unwrap_or_else(|| {
            let total = self.n_tasks + self.n_arrivals;
            total.div_ceil(self.n_agents.max(1)) + 1
        })
    }

    fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::InvalidParameter("n_agents must be >= 1".into()));
        }
        if !(self.area > 0.0) {
            return Err(Error::InvalidParameter("area must be > 0".into()));
        }
        if !(self.speed > 0.0) {
            return Err(Error::InvalidParameter("speed must be > 0".into()));
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "discount must be in (0, 1], got {}",
                self.discount
            )));
        }
        if self.reward < 0.0 {
            return Err(Error::InvalidParameter("reward must be >= 0".into()));
        }
        Ok(())
    }
}

impl Scenario {
    /// Samples a scenario from `seed`: agents and tasks uniform in the
    /// square area, arrivals drawn the same way. Deterministic for fixed
    /// inputs.
    pub fn generate(seed: u64, params: &GenParams) -> Result<Scenario> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = |rng: &mut ChaCha8Rng| {
            Point::new(
                rng.random_range(0.0..params.area),
                rng.random_range(0.0..params.area),
            )
        };
        let capacity = params.effective_capacity();

        let agents = (0..params.n_agents)
            .map(|i| AgentSpec {
                id: AgentId(i as u32),
                position: sample(&mut rng),
                speed: params.speed,
                capacity,
            })
            .collect();
        let task = |id: usize, position: Point| TaskSpec {
            id: TaskId(id as u32),
            position,
            reward: params.reward,
            discount: params.discount,
        };
        let tasks = (0..params.n_tasks)
            .map(|i| {
                let p = sample(&mut rng);
                task(i, p)
            })
            .collect();
        let arrivals = (0..params.n_arrivals)
            .map(|i| {
                let p = sample(&mut rng);
                task(params.n_tasks + i, p)
            })
            .collect();

        let scenario = Scenario {
            version: SCENARIO_VERSION,
            seed,
            agents,
            tasks,
            arrivals,
            topology: params.topology,
            strategy: vec![params.strategy.clone(); params.n_arrivals],
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Structural validation: version, unique ids, per-arrival parameters.
    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported scenario version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.agents.is_empty() {
            return Err(Error::InvalidParameter(
                "a scenario needs at least one agent".into(),
            ));
        }
        let mut agent_ids = BTreeSet::new();
        for agent in &self.agents {
            agent.validate()?;
            if !agent_ids.insert(agent.id) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate agent id {}",
                    agent.id
                )));
            }
        }
        let mut task_ids = BTreeSet::new();
        for task in self.tasks.iter().chain(&self.arrivals) {
            task.validate()?;
            if !task_ids.insert(task.id) {
                return Err(Error::DuplicateTask(task.id));
            }
        }
        if self.strategy.len() != self.arrivals.len() {
            return Err(Error::InvalidParameter(format!(
                "{} strategy parameter sets for {} arrivals",
                self.strategy.len(),
                self.arrivals.len()
            )));
        }
        for params in &self.strategy {
            if !(params.round_duration > 0.0) {
                return Err(Error::InvalidParameter(
                    "round_duration must be > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Builds the initial world: initial tasks known, arrivals pending.
    pub fn build_world(&self) -> Result<WorldState> {
        self.validate()?;
        let tasks = TaskTable::from_specs(self.tasks.iter().cloned())?;
        let graph = CommGraph::build(
            self.topology,
            self.agents.iter().map(|a| a.id),
            self.seed,
        )?;
        WorldState::new(self.agents.clone(), tasks, graph)
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("scenarios always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Scenario> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| Error::Parse {
                path: origin.to_string(),
                message: e.to_string(),
            })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Scenario> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Scenario::from_json(&text, &path.display().to_string())
    }

    /// Stable content hash of the serialized scenario, for tagging result
    /// rows that share a world.
    pub fn content_hash(&self) -> u64 {
        fnv1a(self.to_json().as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &byte in bytes {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
