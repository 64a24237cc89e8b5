//! Decentralized multi-agent task allocation with consensus-based bundle
//! auctions, plus partial replanning for tasks that arrive mid-mission.
//!
//! Agents repeatedly run two phases: each greedily bids a *bundle* of tasks
//! into its planned path ([`bundle`]), then exchanges winner/bid/timestamp
//! lists with its neighbors and resolves conflicts ([`consensus`]). On a
//! connected graph the team converges to the same assignment a centralized
//! sequential greedy solver produces ([`sga`]). When a new task appears
//! after convergence, [`replan`] strategies trade response time against
//! coordination by releasing part of the previous allocation: nothing, each
//! agent's lowest bids, the team-wide lowest bids, or everything.
//!
//! [`netsim`] provides the synchronous round fabric and convergence
//! detection; [`harness`] generates reproducible scenarios, runs
//! experiments with metrics, and sweeps seeds across strategies.
//!
//! ```
//! use cbba::harness::{GenParams, RunOptions, Scenario, run_experiment};
//! use cbba::replan::StrategyKind;
//!
//! let params = GenParams {
//!     n_agents: 3,
//!     n_tasks: 6,
//!     n_arrivals: 1,
//!     capacity: Some(3),
//!     ..GenParams::default()
//! };
//! let scenario = Scenario::generate(7, &params).unwrap();
//! let outcome =
//!     run_experiment(&scenario, StrategyKind::PartialTeam, &RunOptions::default())
//!         .unwrap();
//! println!(
//!     "initial: {} rounds, arrival: {} rounds, gain {:.4}",
//!     outcome.metrics.initial_rounds,
//!     outcome.metrics.arrivals[0].rounds,
//!     outcome.metrics.arrivals[0].delta,
//! );
//! ```

pub mod bundle;
pub mod consensus;
pub mod error;
pub mod graph;
pub mod harness;
pub mod netsim;
pub mod replan;
pub mod scoring;
pub mod sga;
pub mod state;
pub mod types;

pub use consensus::{apply_message, release_from, BeliefSnapshot, MergeOutcome};
pub use error::{Error, Result};
pub use graph::{CommGraph, TopologySpec};
pub use netsim::{EventLog, LogRecord, WorldState};
pub use replan::{ResetStrategy, StrategyKind, Subteam};
pub use scoring::{best_insertion, path_score, Insertion};
pub use sga::{SgaBid, SgaSolution};
pub use state::{AgentState, BeliefState, Bundle, Path};
pub use types::{AgentId, AgentSpec, Point, Score, TaskId, TaskSpec, TaskTable};
