//! Static allocation: a small team converges on a fixed task set and the
//! result is checked against the centralized sequential greedy solution.
//!
//! Run with: cargo run --example static_allocation

use cbba::graph::CommGraph;
use cbba::netsim::WorldState;
use cbba::replan::ResetStrategy;
use cbba::sga;
use cbba::types::{AgentId, AgentSpec, Point, TaskId, TaskSpec, TaskTable};

fn main() -> cbba::Result<()> {
    let agents = vec![
        AgentSpec {
            id: AgentId(0),
            position: Point::new(10.0, 10.0),
            speed: 1.0,
            capacity: 3,
        },
        AgentSpec {
            id: AgentId(1),
            position: Point::new(80.0, 20.0),
            speed: 1.0,
            capacity: 3,
        },
        AgentSpec {
            id: AgentId(2),
            position: Point::new(40.0, 70.0),
            speed: 1.0,
            capacity: 3,
        },
    ];
    let tasks = TaskTable::from_specs((0..7).map(|i| TaskSpec {
        id: TaskId(i),
        position: Point::new(12.0 * i as f64 + 5.0, (i as f64 * 23.0) % 60.0),
        reward: 1.0,
        discount: 0.95,
    }))?;

    // Every agent talks to every other agent each round.
    let graph = CommGraph::complete(agents.iter().map(|a| a.id))?;
    let mut world = WorldState::new(agents.clone(), tasks.clone(), graph)?;

    let rounds = world.run_until_converged(&ResetStrategy::None, 1000, "static")?;
    println!("converged in {rounds} rounds, {} messages\n", world.messages_sent);

    for state in world.agents.values() {
        let path: Vec<String> = state.path.iter().map(|t| t.to_string()).collect();
        println!(
            "agent {}: path [{}], score {:.4}",
            state.id(),
            path.join(" -> "),
            cbba::path_score(&state.spec, &state.path, &world.tasks)?.get()
        );
    }
    println!("team score: {:.4}\n", world.team_score()?.get());

    // The decentralized result reproduces the centralized greedy solution.
    let greedy = sga::solve(&agents, &tasks)?;
    println!("sequential greedy selection order:");
    for bid in &greedy.bids {
        let winner = world.agents[&bid.agent].belief.winner(bid.task);
        println!(
            "  task {} -> agent {} at bid {:.4} (team agrees: {})",
            bid.task,
            bid.agent,
            bid.bid.get(),
            winner == Some(bid.agent)
        );
    }
    Ok(())
}
