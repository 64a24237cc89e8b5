//! Crate-wide error type.

use crate::types::TaskId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown task id {0}")]
    UnknownTask(TaskId),

    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),

    #[error("communication graph is not connected")]
    DisconnectedGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(
        "no convergence after {rounds} rounds (ceiling {ceiling}) during {phase}; \
         {disagreements} belief disagreements remain"
    )]
    NonConvergence {
        rounds: u64,
        ceiling: u64,
        /// Which part of the experiment failed, e.g. "initial allocation" or "arrival 3".
        phase: String,
        /// Number of (agent pair, task) entries still in conflict.
        disagreements: usize,
        /// Tail of the per-round event log for post-mortem inspection.
        events: Vec<crate::netsim::LogRecord>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
