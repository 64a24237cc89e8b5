//! Communication topologies and how the network diameter drives
//! convergence: the same task set solved over complete, ring, line, and
//! random-geometric graphs.
//!
//! Run with: cargo run --example topologies

use cbba::graph::{CommGraph, TopologySpec};
use cbba::harness::{run_experiment, GenParams, RunOptions, Scenario};
use cbba::replan::StrategyKind;
use cbba::types::AgentId;

fn main() -> cbba::Result<()> {
    let ids = || (0..6).map(AgentId);

    println!("diameters for six agents:");
    for (name, graph) in [
        ("complete", CommGraph::complete(ids())?),
        ("ring", CommGraph::ring(ids())?),
        ("line", CommGraph::line(ids())?),
        ("random-geometric r=0.55", CommGraph::random_geometric(ids(), 3, 0.55)?),
    ] {
        println!(
            "  {name:<24} {} edges, diameter {}",
            graph.edge_count(),
            graph.diameter()?
        );
    }

    // Same world, different wiring: rounds stay within tasks*D + D.
    println!("\nconvergence on 10 tasks, six agents:");
    for topology in [
        TopologySpec::Complete,
        TopologySpec::Ring,
        TopologySpec::Line,
        TopologySpec::RandomGeometric { radius: 0.55 },
    ] {
        let params = GenParams {
            n_agents: 6,
            n_tasks: 10,
            n_arrivals: 0,
            capacity: Some(3),
            topology,
            ..GenParams::default()
        };
        let scenario = Scenario::generate(31, &params)?;
        let world = scenario.build_world()?;
        let diameter = world.graph.diameter()?;
        let outcome = run_experiment(&scenario, StrategyKind::None, &RunOptions::default())?;
        println!(
            "  {topology:?}: diameter {diameter}, converged in {} rounds (bound {})",
            outcome.metrics.initial_rounds,
            10 * diameter + diameter
        );
    }
    Ok(())
}
