//! Index-level graph access shared by the lattice structures and by the
//! small arbitrary graphs used to cross-check the walk kernels.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Read-only adjacency over dense node indices `0..node_count()`.
pub trait GraphView: Sync {
    fn node_count(&self) -> usize;

    fn neighbors(&self, node: usize) -> &[usize];

    fn degree(&self, node: usize) -> usize {
        self.neighbors(node).len()
    }

    fn edge_count(&self) -> usize {
        (0..self.node_count())
            .map(|n| self.degree(n))
            .sum::<usize>()
            / 2
    }
}

/// A plain undirected simple graph over indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
        }
    }

    /// Builds a graph from an edge list, ignoring self-loops and repeats.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(node_count);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Returns false when the edge is a self-loop or already present.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        if a == b || self.adjacency[a].contains(&b) {
            return false;
        }
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
        true
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    /// Node 0 is the center.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::from_edges(leaves + 1, &edges)
    }
}

impl GraphView for SimpleGraph {
    fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }
}

/// Nodes grouped by exact shortest-path distance from `source`:
/// `rings[h]` holds the nodes at distance `h`, sorted by index.
pub fn bfs_rings<G: GraphView + ?Sized>(
    graph: &G,
    source: usize,
    h_max: usize,
) -> Result<Vec<Vec<usize>>> {
    if source >= graph.node_count() {
        return Err(Error::UnknownNode(source.to_string()));
    }
    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut rings = vec![Vec::new(); h_max + 1];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(u) = queue.pop_front() {
        let d = dist[u];
        rings[d].push(u);
        if d == h_max {
            continue;
        }
        for &v in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = d + 1;
                queue.push_back(v);
            }
        }
    }
    for ring in &mut rings {
        ring.sort_unstable();
    }
    Ok(rings)
}

/// True when every node is reachable from node 0 (empty graphs count as connected).
pub fn is_connected<G: GraphView + ?Sized>(graph: &G) -> bool {
    let n = graph.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}
