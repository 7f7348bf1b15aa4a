//! Independent oracles for the walk kernels. Nothing here calls into the
//! propagation code under test.

#![allow(dead_code)]

use rand::Rng;

use radial_core::graph::{is_connected, GraphView, SimpleGraph};

/// Exact `h`-step distribution by enumerating every walk of length `h` and
/// multiplying the `1/degree` factors along it.
pub fn brute_force_walk<G: GraphView>(g: &G, source: usize, h: usize) -> Vec<f64> {
    fn rec<G: GraphView>(g: &G, at: usize, left: usize, weight: f64, out: &mut [f64]) {
        if left == 0 {
            out[at] += weight;
            return;
        }
        let nbrs = g.neighbors(at);
        for &v in nbrs {
            rec(g, v, left - 1, weight / nbrs.len() as f64, out);
        }
    }
    let mut out = vec![0.0; g.node_count()];
    rec(g, source, h, 1.0, &mut out);
    out
}

/// Every connected labeled simple graph on 2..=n nodes.
pub fn connected_graphs_up_to(n: usize) -> Vec<SimpleGraph> {
    let mut out = Vec::new();
    for k in 2..=n {
        let pairs: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
            .collect();
        for mask in 0u64..(1 << pairs.len()) {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            let g = SimpleGraph::from_edges(k, &edges);
            if is_connected(&g) {
                out.push(g);
            }
        }
    }
    out
}

/// A random spanning tree plus random extra edges.
pub fn random_connected_graph<R: Rng>(n: usize, rng: &mut R) -> SimpleGraph {
    let mut g = SimpleGraph::new(n);
    for v in 1..n {
        let u = rng.random_range(0..v);
        g.add_edge(u, v);
    }
    let extra = rng.random_range(0..=n * (n - 1) / 2 - (n - 1));
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        g.add_edge(a, b);
    }
    g
}
