//! Experiment harness: scenario generation and persistence, single-run
//! execution with metrics, assignment validation, seeded strategy sweeps,
//! and result emission (CSV tables, SVG box plots).

pub mod experiment;
pub mod monte_carlo;
pub mod plot;
pub mod scenario;
pub mod validate;
pub mod world_io;

pub use experiment::{
    build_strategy, run_experiment, score_delta, ArrivalMetrics, ExperimentOutcome,
    RunMetrics, RunOptions,
};
pub use monte_carlo::{
    monte_carlo, write_aggregates_csv, write_rows_csv, StrategyAggregate, SweepConfig,
    SweepResult, SweepRow,
};
pub use plot::{boxplot_svg, reconvergence_boxplot};
pub use scenario::{GenParams, Scenario, StrategyParams, SCENARIO_VERSION};
pub use validate::{validate_assignment, CheckResult, ValidationReport};
pub use world_io::{load_world, save_world, WORLD_VERSION};
