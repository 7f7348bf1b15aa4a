//! Node accessibility: the exponential entropy of exact `h`-step uniform
//! random-walk probabilities, taken over the nodes at distance exactly `h`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::GraphView;
use crate::lattice::{LatticeGraph, Site};
use crate::registry::Strategy;

/// Turns the walk masses that landed on an `h`-ring into an accessibility
/// value. Returns `None` when the ring is nonempty but carries no mass.
pub trait Normalization: Strategy {
    fn alpha(&self, ring_masses: &[f64]) -> Option<f64>;
}

/// Renormalizes the ring masses to a distribution before taking the
/// exponential entropy. The result lies in `[1, |ring|]` for a nonempty ring.
#[derive(Debug, Clone, Copy, Default)]
pub struct RingNormalized;

impl Strategy for RingNormalized {
    fn name(&self) -> &'static str {
        "ring"
    }

    fn description(&self) -> &'static str {
        "renormalize h-step masses over the h-ring"
    }
}

impl Normalization for RingNormalized {
    fn alpha(&self, ring_masses: &[f64]) -> Option<f64> {
        if ring_masses.is_empty() {
            return Some(0.0);
        }
        let total: f64 = ring_masses.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let entropy: f64 = ring_masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| {
                let q = p / total;
                -q * q.ln()
            })
            .sum();
        Some(entropy.exp())
    }
}

/// Uses the raw `h`-step masses on the ring without renormalizing them.
/// Not bounded by `|ring|` in general.
#[derive(Debug, Clone, Copy, Default)]
pub struct RawMasses;

impl Strategy for RawMasses {
    fn name(&self) -> &'static str {
        "raw"
    }

    fn description(&self) -> &'static str {
        "use raw h-step masses on the h-ring without renormalization"
    }
}

impl Normalization for RawMasses {
    fn alpha(&self, ring_masses: &[f64]) -> Option<f64> {
        if ring_masses.is_empty() {
            return Some(0.0);
        }
        if ring_masses.iter().all(|&p| p <= 0.0) {
            return None;
        }
        let entropy: f64 = ring_masses
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum();
        Some(entropy.exp())
    }
}

/// Probability mass after exactly `h` steps, sorted by node index.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    pub source: usize,
    pub h: usize,
    pub probs: Vec<(usize, f64)>,
}

impl WalkDistribution {
    pub fn get(&self, node: usize) -> f64 {
        self.probs
            .binary_search_by_key(&node, |&(n, _)| n)
            .map_or(0.0, |i| self.probs[i].1)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|&(_, p)| p).sum()
    }
}

/// Per-thread scratch space sized to the graph. All buffers are restored to
/// their idle state after each source.
struct Workspace {
    dist: Vec<usize>,
    mass: Vec<f64>,
    next: Vec<f64>,
    queued: Vec<bool>,
    visited: Vec<usize>,
    active: Vec<usize>,
    upcoming: Vec<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![usize::MAX; n],
            mass: vec![0.0; n],
            next: vec![0.0; n],
            queued: vec![false; n],
            visited: Vec::new(),
            active: Vec::new(),
            upcoming: Vec::new(),
        }
    }

    /// Rings `0..=depth` around `source`, each sorted by index.
    fn rings<G: GraphView + ?Sized>(
        &mut self,
        g: &G,
        source: usize,
        depth: usize,
    ) -> Vec<Vec<usize>> {
        let mut rings = vec![Vec::new(); depth + 1];
        self.dist[source] = 0;
        self.visited.push(source);
        rings[0].push(source);
        for d in 0..depth {
            let (done, rest) = rings.split_at_mut(d + 1);
            for &u in &done[d] {
                for &v in g.neighbors(u) {
                    if self.dist[v] == usize::MAX {
                        self.dist[v] = d + 1;
                        self.visited.push(v);
                        rest[0].push(v);
                    }
                }
            }
            rest[0].sort_unstable();
        }
        for &v in &self.visited {
            self.dist[v] = usize::MAX;
        }
        self.visited.clear();
        rings
    }

    /// Advances a unit mass at `source` step by step, calling `visit(step, mass)`
    /// after each step up to `steps`.
    fn propagate<G, F>(&mut self, g: &G, source: usize, steps: usize, mut visit: F) -> Result<()>
    where
        G: GraphView + ?Sized,
        F: FnMut(usize, &[f64], &[usize]) -> Result<()>,
    {
        self.mass[source] = 1.0;
        self.active.push(source);
        let mut outcome = Ok(());
        for step in 1..=steps {
            for &u in &self.active {
                let m = std::mem::take(&mut self.mass[u]);
                let nbrs = g.neighbors(u);
                if nbrs.is_empty() {
                    outcome = Err(Error::DegenerateGraph(u));
                    break;
                }
                let share = m / nbrs.len() as f64;
                for &v in nbrs {
                    if !self.queued[v] {
                        self.queued[v] = true;
                        self.upcoming.push(v);
                    }
                    self.next[v] += share;
                }
            }
            if outcome.is_err() {
                break;
            }
            std::mem::swap(&mut self.mass, &mut self.next);
            std::mem::swap(&mut self.active, &mut self.upcoming);
            self.upcoming.clear();
            self.active.sort_unstable();
            for &v in &self.active {
                self.queued[v] = false;
            }
            if let Err(e) = visit(step, &self.mass, &self.active) {
                outcome = Err(e);
                break;
            }
        }
        for v in self.active.drain(..).chain(self.upcoming.drain(..)) {
            self.mass[v] = 0.0;
            self.next[v] = 0.0;
            self.queued[v] = false;
        }
        // A degenerate node may leave mass behind in either buffer.
        if outcome.is_err() {
            self.mass.iter_mut().for_each(|m| *m = 0.0);
            self.next.iter_mut().for_each(|m| *m = 0.0);
        }
        outcome
    }

    fn profile<G: GraphView + ?Sized>(
        &mut self,
        g: &G,
        source: usize,
        hs: &[usize],
        norm: &dyn Normalization,
    ) -> Result<Vec<f64>> {
        let depth = hs.iter().copied().max().unwrap_or(0);
        let rings = self.rings(g, source, depth);
        let mut out = vec![0.0; hs.len()];
        let mut ring_masses = Vec::new();
        self.propagate(g, source, depth, |step, mass, _| {
            for (slot, _) in hs.iter().enumerate().filter(|&(_, &h)| h == step) {
                ring_masses.clear();
                ring_masses.extend(rings[step].iter().map(|&v| mass[v]));
                out[slot] = norm.alpha(&ring_masses).ok_or(Error::NotReached {
                    node: source,
                    h: step,
                })?;
            }
            Ok(())
        })?;
        Ok(out)
    }
}

fn check_source<G: GraphView + ?Sized>(g: &G, source: usize, h: usize) -> Result<()> {
    if source >= g.node_count() {
        return Err(Error::UnknownNode(source.to_string()));
    }
    if h < 1 {
        return Err(Error::InvalidHierarchy(h));
    }
    Ok(())
}

/// Exact distribution of a uniform random walk from `source` after `h` steps.
pub fn walk_distribution<G: GraphView + ?Sized>(
    g: &G,
    source: usize,
    h: usize,
) -> Result<WalkDistribution> {
    check_source(g, source, h)?;
    let mut ws = Workspace::new(g.node_count());
    let mut probs = Vec::new();
    ws.propagate(g, source, h, |step, mass, active| {
        if step == h {
            probs = active.iter().map(|&v| (v, mass[v])).collect();
        }
        Ok(())
    })?;
    Ok(WalkDistribution { source, h, probs })
}

pub fn accessibility<G: GraphView + ?Sized>(
    g: &G,
    source: usize,
    h: usize,
    norm: &dyn Normalization,
) -> Result<f64> {
    Ok(accessibility_profile(g, source, &[h], norm)?[0])
}

/// Accessibility of one source at several hierarchies from a single walk.
pub fn accessibility_profile<G: GraphView + ?Sized>(
    g: &G,
    source: usize,
    hs: &[usize],
    norm: &dyn Normalization,
) -> Result<Vec<f64>> {
    for &h in hs {
        check_source(g, source, h)?;
    }
    Workspace::new(g.node_count()).profile(g, source, hs, norm)
}

/// Accessibility for every source in `sources` at every `h` in `hs`,
/// computed in parallel. `result[k][i]` is source `i` at `hs[k]`.
pub fn accessibility_matrix<G: GraphView + ?Sized>(
    g: &G,
    sources: &[usize],
    hs: &[usize],
    norm: &dyn Normalization,
) -> Result<Vec<Vec<f64>>> {
    for &s in sources {
        for &h in hs {
            check_source(g, s, h)?;
        }
    }
    let n = g.node_count();
    let rows: Vec<Vec<f64>> = sources
        .par_iter()
        .map_init(|| Workspace::new(n), |ws, &s| ws.profile(g, s, hs, norm))
        .collect::<Result<_>>()?;
    Ok((0..hs.len())
        .map(|k| rows.iter().map(|r| r[k]).collect())
        .collect())
}

/// Growth stage, preference and seed of the structure a field came from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldMeta {
    pub e: usize,
    pub p_n: f64,
    pub seed: u64,
}

/// Accessibility values of a set of nodes at one hierarchy, sorted by site.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessibilityField {
    pub h: usize,
    pub entries: Vec<(Site, f64)>,
    pub meta: FieldMeta,
}

impl AccessibilityField {
    pub fn get(&self, site: Site) -> Option<f64> {
        self.entries
            .binary_search_by_key(&site, |&(s, _)| s)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, a)| a)
    }

    /// CSV: `x,y,h,alpha`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "x,y,h,alpha")?;
        for &(s, a) in &self.entries {
            writeln!(out, "{},{},{},{}", s.x, s.y, self.h, a)?;
        }
        Ok(())
    }
}

/// Fields for the given nodes (all nodes when `nodes` is `None`) at each `h`.
pub fn accessibility_fields(
    graph: &LatticeGraph,
    hs: &[usize],
    norm: &dyn Normalization,
    nodes: Option<&[Site]>,
) -> Result<Vec<AccessibilityField>> {
    let mut sites: Vec<Site> = match nodes {
        Some(n) => n.to_vec(),
        None => graph.sites().to_vec(),
    };
    sites.sort_unstable();
    let indices: Vec<usize> = sites
        .iter()
        .map(|&s| {
            graph
                .index_of(s)
                .ok_or_else(|| Error::UnknownNode(s.to_string()))
        })
        .collect::<Result<_>>()?;
    let matrix = accessibility_matrix(graph, &indices, hs, norm)?;
    Ok(hs
        .iter()
        .zip(matrix)
        .map(|(&h, values)| AccessibilityField {
            h,
            entries: sites.iter().copied().zip(values).collect(),
            meta: FieldMeta {
                e: graph.edge_count(),
                ..FieldMeta::default()
            },
        })
        .collect())
}

pub fn accessibility_field(
    graph: &LatticeGraph,
    h: usize,
    norm: &dyn Normalization,
) -> Result<AccessibilityField> {
    Ok(accessibility_fields(graph, &[h], norm, None)?.remove(0))
}
