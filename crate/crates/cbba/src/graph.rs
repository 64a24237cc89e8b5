//! Communication topology: undirected, unweighted graphs over agent ids,
//! with the hop-diameter computation the convergence bounds are stated in.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::AgentId;

/// How to wire the team together. Random-geometric graphs connect agents
/// whose sampled unit-square positions lie within `radius`, redrawing until
/// connected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySpec {
    Complete,
    Line,
    Ring,
    RandomGeometric { radius: f64 },
}

/// Undirected communication graph without self-loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommGraph {
    adjacency: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

impl CommGraph {
    /// Builds the requested topology over `ids`. Line and ring order follows
    /// ascending agent id. Deterministic for a fixed (spec, ids, seed).
    pub fn build(
        spec: TopologySpec,
        ids: impl IntoIterator<Item = AgentId>,
        seed: u64,
    ) -> Result<Self> {
        match spec {
            TopologySpec::Complete => Self::complete(ids),
            TopologySpec::Line => Self::line(ids),
            TopologySpec::Ring => Self::ring(ids),
            TopologySpec::RandomGeometric { radius } => {
                Self::random_geometric(ids, seed, radius)
            }
        }
    }

    pub fn complete(ids: impl IntoIterator<Item = AgentId>) -> Result<Self> {
        let nodes = collect_nodes(ids)?;
        let mut graph = CommGraph::empty(&nodes);
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                graph.add_edge(a, b);
            }
        }
        Ok(graph)
    }

    pub fn line(ids: impl IntoIterator<Item = AgentId>) -> Result<Self> {
        let nodes = collect_nodes(ids)?;
        let mut graph = CommGraph::empty(&nodes);
        for pair in nodes.windows(2) {
            graph.add_edge(pair[0], pair[1]);
        }
        Ok(graph)
    }

    pub fn ring(ids: impl IntoIterator<Item = AgentId>) -> Result<Self> {
        let nodes = collect_nodes(ids)?;
        let mut graph = CommGraph::empty(&nodes);
        for pair in nodes.windows(2) {
            graph.add_edge(pair[0], pair[1]);
        }
        if nodes.len() > 2 {
            graph.add_edge(nodes[0], *nodes.last().unwrap());
        }
        Ok(graph)
    }

    /// Samples unit-square positions from `seed` and connects agents within
    /// `radius`. Disconnected draws are rejected and redrawn, up to a bounded
    /// number of attempts.
    pub fn random_geometric(
        ids: impl IntoIterator<Item = AgentId>,
        seed: u64,
        radius: f64,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric radius must be > 0, got {radius}"
            )));
        }
        let nodes = collect_nodes(ids)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        const MAX_ATTEMPTS: usize = 64;
        for _ in 0..MAX_ATTEMPTS {
            let points: Vec<(f64, f64)> = nodes
                .iter()
                .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let mut graph = CommGraph::empty(&nodes);
            for (i, &a) in nodes.iter().enumerate() {
                for (j, &b) in nodes.iter().enumerate().skip(i + 1) {
                    let dx = points[i].0 - points[j].0;
                    let dy = points[i].1 - points[j].1;
                    if (dx * dx + dy * dy).sqrt() <= radius {
                        graph.add_edge(a, b);
                    }
                }
            }
            if graph.is_connected() {
                return Ok(graph);
            }
        }
        Err(Error::InvalidParameter(format!(
            "no connected geometric graph with radius {radius} after {MAX_ATTEMPTS} draws"
        )))
    }

    fn empty(nodes: &[AgentId]) -> Self {
        CommGraph {
            adjacency: nodes.iter().map(|&id| (id, BTreeSet::new())).collect(),
        }
    }

    fn add_edge(&mut self, a: AgentId, b: AgentId) {
        assert_ne!(a, b, "self-loops are not allowed");
        self.adjacency.get_mut(&a).expect("node exists").insert(b);
        self.adjacency.get_mut(&b).expect("node exists").insert(a);
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.adjacency.keys().copied()
    }

    /// Neighbors of `id`, ascending.
    pub fn neighbors(&self, id: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.adjacency
            .get(&id)
            .into_iter()
            .flat_map(|n| n.iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.adjacency.keys().next() else {
            return true;
        };
        self.bfs_distances(start).len() == self.adjacency.len()
    }

    /// Hop distances from `start` to every reachable node.
    fn bfs_distances(&self, start: AgentId) -> BTreeMap<AgentId, u64> {
        let mut distances = BTreeMap::new();
        let mut queue = VecDeque::new();
        distances.insert(start, 0);
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            let d = distances[&node];
            for next in self.neighbors(node) {
                if let std::collections::btree_map::Entry::Vacant(slot) =
                    distances.entry(next)
                {
                    slot.insert(d + 1);
                    queue.push_back(next);
                }
            }
        }
        distances
    }

    /// BFS tree parents rooted at `start` (ascending-id tie order), for
    /// splicing nodes onto shortest paths. Errors if the graph is
    /// disconnected.
    pub fn bfs_parents(&self, start: AgentId) -> Result<BTreeMap<AgentId, AgentId>> {
        let mut parents = BTreeMap::new();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            for next in self.neighbors(node) {
                if seen.insert(next) {
                    parents.insert(next, node);
                    queue.push_back(next);
                }
            }
        }
        if seen.len() != self.adjacency.len() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(parents)
    }

    /// Maximum shortest-path hop count over all node pairs (all-pairs BFS).
    /// A single node has diameter 0. Errors if disconnected.
    pub fn diameter(&self) -> Result<u64> {
        let mut max = 0;
        for node in self.nodes() {
            let distances = self.bfs_distances(node);
            if distances.len() != self.adjacency.len() {
                return Err(Error::DisconnectedGraph);
            }
            max = max.max(distances.values().copied().max().unwrap_or(0));
        }
        Ok(max)
    }

    /// Subgraph induced by `members` (edges with both endpoints inside).
    pub fn induced(&self, members: &BTreeSet<AgentId>) -> CommGraph {
        let adjacency = members
            .iter()
            .filter(|id| self.adjacency.contains_key(id))
            .map(|&id| {
                let neighbors = self
                    .neighbors(id)
                    .filter(|n| members.contains(n))
                    .collect();
                (id, neighbors)
            })
            .collect();
        CommGraph { adjacency }
    }
}

fn collect_nodes(ids: impl IntoIterator<Item = AgentId>) -> Result<Vec<AgentId>> {
    let set: BTreeSet<AgentId> = ids.into_iter().collect();
    if set.is_empty() {
        return Err(Error::InvalidParameter(
            "a topology needs at least one agent".into(),
        ));
    }
    Ok(set.into_iter().collect())
}
