//! Radial growth: a straight axis of `L` nodes from which lattice edges are
//! attached one at a time with orientation-preferential probabilities.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::GraphView;
use crate::lattice::{candidate_edges, lattice_capacity, Edge, LatticeGraph, Orientation, Site};
use crate::sampler::{Choice, EdgeSampler};

/// Identifies the generator used for every random stream in this crate.
pub const RNG_ID: &str = "rand_chacha-0.9/ChaCha8Rng/seed_from_u64";

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for run `run` of an ensemble: the first word of stream `run` of the
/// master generator.
pub fn derive_run_seed(master: u64, run: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run as u64);
    rng.next_u64()
}

/// Which side(s) of the axis the structure may occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sides {
    #[default]
    Both,
    /// Rows `y >= y_axis` only.
    Above,
}

impl Sides {
    pub fn as_str(self) -> &'static str {
        match self {
            Sides::Both => "both",
            Sides::Above => "above",
        }
    }
}

impl fmt::Display for Sides {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sides {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(Sides::Both),
            "above" => Ok(Sides::Above),
            _ => Err(Error::config(format!(
                "sides must be `both` or `above`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    /// Axis extent `L` (nodes along the axis).
    pub width: u32,
    /// Rectangle height `H` (rows).
    pub height: u32,
    /// Probability of preferring a normal link; the parallel preference is `1 - p_n`.
    pub p_n: f64,
    /// Target growth stage.
    pub target_e: usize,
    pub seed: u64,
    pub sides: Sides,
    /// When true a stage counts every edge, axis included. When false it
    /// counts only the edges added after the axis.
    pub count_axis_edges: bool,
}

impl GrowthConfig {
    pub fn new(width: u32, height: u32, p_n: f64, target_e: usize, seed: u64) -> Self {
        Self {
            width,
            height,
            p_n,
            target_e,
            seed,
            sides: Sides::Both,
            count_axis_edges: true,
        }
    }

    pub fn p_p(&self) -> f64 {
        1.0 - self.p_n
    }

    pub fn y_axis(&self) -> u32 {
        self.height / 2
    }

    /// Rows available for growth.
    pub fn rows(&self) -> (u32, u32) {
        match self.sides {
            Sides::Both => (0, self.height.saturating_sub(1)),
            Sides::Above => (self.y_axis(), self.height.saturating_sub(1)),
        }
    }

    pub fn axis_edges(&self) -> usize {
        self.width.saturating_sub(1) as usize
    }

    /// Lattice edge capacity of the allowed region.
    pub fn capacity(&self) -> usize {
        let (lo, hi) = self.rows();
        lattice_capacity(self.width.max(1), hi - lo + 1)
    }

    /// Total edge count corresponding to growth stage `stage`.
    pub fn total_edges(&self, stage: usize) -> usize {
        if self.count_axis_edges {
            stage
        } else {
            stage + self.axis_edges()
        }
    }

    /// Growth stage of a graph with `edges` edges.
    pub fn stage_of(&self, edges: usize) -> usize {
        if self.count_axis_edges {
            edges
        } else {
            edges - self.axis_edges()
        }
    }

    pub fn validate_dims(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::config(format!(
                "L must be at least 2, got {}",
                self.width
            )));
        }
        if self.height < 1 {
            return Err(Error::config("H must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_n) {
            return Err(Error::config(format!(
                "p_n must lie in [0, 1], got {}",
                self.p_n
            )));
        }
        Ok(())
    }

    pub fn validate_stage(&self, stage: usize) -> Result<()> {
        let total = self.total_edges(stage);
        if total < self.axis_edges() {
            return Err(Error::config(format!(
                "target e={stage} is below the axis edge count L-1={}",
                self.axis_edges()
            )));
        }
        if total > self.capacity() {
            return Err(Error::config(format!(
                "target e={stage} exceeds the lattice edge capacity {} of the growth region",
                self.capacity()
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_dims()?;
        self.validate_stage(self.target_e)
    }
}

/// The straight reference chain: `L` nodes on row `y_axis` joined by `L - 1`
/// parallel edges.
pub fn initialize_axis(config: &GrowthConfig) -> Result<LatticeGraph> {
    config.validate_dims()?;
    let y = config.y_axis();
    let (lo, hi) = config.rows();
    let mut graph = LatticeGraph::new(config.width, config.height, y)?.with_rows(lo, hi)?;
    for x in 1..config.width {
        graph.add_edge(Site::new(x - 1, y), Site::new(x, y))?;
    }
    Ok(graph)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub edge: Edge,
    pub orientation: Orientation,
    pub fallback: bool,
}

/// Ordered record of every attached edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrowthTrace {
    pub steps: Vec<TraceStep>,
}

impl GrowthTrace {
    fn push(&mut self, choice: Choice) {
        self.steps.push(TraceStep {
            step: self.steps.len() + 1,
            edge: choice.edge,
            orientation: choice.orientation,
            fallback: choice.fallback,
        });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// CSV: `step,x1,y1,x2,y2,orientation,fallback`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "step,x1,y1,x2,y2,orientation,fallback")?;
        for s in &self.steps {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.step,
                s.edge.lo.x,
                s.edge.lo.y,
                s.edge.hi.x,
                s.edge.hi.y,
                s.orientation,
                s.fallback
            )?;
        }
        Ok(())
    }
}

/// Candidate edges of both orientations, maintained incrementally in
/// canonical order as edges are added.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidatePool {
    parallel: Vec<Edge>,
    normal: Vec<Edge>,
}

impl CandidatePool {
    pub fn from_graph(graph: &LatticeGraph) -> Self {
        Self {
            parallel: candidate_edges(graph, Orientation::Parallel),
            normal: candidate_edges(graph, Orientation::Normal),
        }
    }

    pub fn get(&self, orientation: Orientation) -> &[Edge] {
        match orientation {
            Orientation::Parallel => &self.parallel,
            Orientation::Normal => &self.normal,
        }
    }

    fn get_mut(&mut self, orientation: Orientation) -> &mut Vec<Edge> {
        match orientation {
            Orientation::Parallel => &mut self.parallel,
            Orientation::Normal => &mut self.normal,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.parallel.is_empty() && self.normal.is_empty()
    }

    /// Updates the pool after `edge` was added to `graph`, which created the
    /// nodes in `created`.
    fn record(&mut self, graph: &LatticeGraph, edge: Edge, created: &[Site]) {
        let list = self.get_mut(edge.orientation());
        if let Ok(pos) = list.binary_search(&edge) {
            list.remove(pos);
        }
        for &s in created {
            for t in graph.lattice_neighbors(s) {
                if graph.has_edge(s, t) {
                    continue;
                }
                let e = Edge::new(s, t);
                let list = self.get_mut(e.orientation());
                if let Err(pos) = list.binary_search(&e) {
                    list.insert(pos, e);
                }
            }
        }
    }
}

fn saturated(graph: &LatticeGraph, target: usize) -> Error {
    Error::Saturated {
        edges: graph.edge_count(),
        target,
        graph: Box::new(graph.clone()),
    }
}

/// One growth step computed from a full candidate scan.
pub fn grow_step(
    graph: &mut LatticeGraph,
    p_n: f64,
    sampler: &dyn EdgeSampler,
    rng: &mut dyn RngCore,
) -> Result<Choice> {
    let parallel = candidate_edges(graph, Orientation::Parallel);
    let normal = candidate_edges(graph, Orientation::Normal);
    let choice = sampler
        .choose(&parallel, &normal, p_n, rng)
        .ok_or_else(|| saturated(graph, graph.edge_count() + 1))?;
    graph.add_edge(choice.edge.lo, choice.edge.hi)?;
    Ok(choice)
}

/// A single growth realization in progress.
pub struct Grower<'s> {
    graph: LatticeGraph,
    pool: CandidatePool,
    rng: ChaCha8Rng,
    p_n: f64,
    sampler: &'s dyn EdgeSampler,
    trace: GrowthTrace,
}

impl<'s> Grower<'s> {
    pub fn new(config: &GrowthConfig, sampler: &'s dyn EdgeSampler) -> Result<Self> {
        let graph = initialize_axis(config)?;
        Ok(Self {
            pool: CandidatePool::from_graph(&graph),
            graph,
            rng: seeded_rng(config.seed),
            p_n: config.p_n,
            sampler,
            trace: GrowthTrace::default(),
        })
    }

    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }

    pub fn candidates(&self) -> &CandidatePool {
        &self.pool
    }

    pub fn trace(&self) -> &GrowthTrace {
        &self.trace
    }

    pub fn step(&mut self) -> Result<Choice> {
        let choice = self
            .sampler
            .choose(
                &self.pool.parallel,
                &self.pool.normal,
                self.p_n,
                &mut self.rng,
            )
            .ok_or_else(|| saturated(&self.graph, self.graph.edge_count() + 1))?;
        let created = self.graph.add_edge(choice.edge.lo, choice.edge.hi)?;
        self.pool.record(&self.graph, choice.edge, &created);
        self.trace.push(choice);
        Ok(choice)
    }

    /// Steps until the graph holds `total_edges` edges.
    pub fn grow_until(&mut self, total_edges: usize) -> Result<()> {
        while self.graph.edge_count() < total_edges {
            if self.pool.is_empty() {
                return Err(saturated(&self.graph, total_edges));
            }
            self.step()?;
        }
        Ok(())
    }

    pub fn into_parts(self) -> (LatticeGraph, GrowthTrace) {
        (self.graph, self.trace)
    }
}

/// Grows one structure to `config.target_e`.
pub fn grow_to(
    config: &GrowthConfig,
    sampler: &dyn EdgeSampler,
) -> Result<(LatticeGraph, GrowthTrace)> {
    config.validate()?;
    let mut grower = Grower::new(config, sampler)?;
    grower.grow_until(config.total_edges(config.target_e))?;
    Ok(grower.into_parts())
}

/// Grows one trajectory and snapshots it at each stage in `stages`
/// (ascending order is imposed). The trajectory stops at the last stage.
pub fn grow_checkpoints(
    config: &GrowthConfig,
    sampler: &dyn EdgeSampler,
    stages: &[usize],
) -> Result<(Vec<(usize, LatticeGraph)>, GrowthTrace)> {
    config.validate_dims()?;
    let mut stages = stages.to_vec();
    stages.sort_unstable();
    stages.dedup();
    if stages.is_empty() {
        return Err(Error::config("at least one growth checkpoint is required"));
    }
    for &s in &stages {
        config.validate_stage(s)?;
    }
    let mut grower = Grower::new(config, sampler)?;
    let mut snapshots = Vec::with_capacity(stages.len());
    for &s in &stages {
        grower.grow_until(config.total_edges(s))?;
        snapshots.push((s, grower.graph().clone()));
    }
    let (_, trace) = grower.into_parts();
    Ok((snapshots, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;
    use crate::sampler::{ClassFirst, PerEdgeWeighted};

    #[test]
    fn axis_at_standard_dimensions() {
        let g = initialize_axis(&GrowthConfig::new(60, 50, 0.5, 1500, 0)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (60, 59));
        assert!(g
            .edges()
            .iter()
            .all(|e| e.orientation() == Orientation::Parallel));
        assert!(g.sites().iter().all(|s| s.y == 25));
        assert!(is_connected(&g));
    }

    #[test]
    fn smallest_axis() {
        let g = initialize_axis(&GrowthConfig::new(2, 1, 0.5, 1, 0)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn axis_of_one_node_is_rejected() {
        assert!(matches!(
            initialize_axis(&GrowthConfig::new(1, 5, 0.5, 0, 0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn first_step_with_p_n_zero_falls_back_to_normal() {
        let cfg = GrowthConfig::new(10, 9, 0.0, 20, 3);
        let mut g = initialize_axis(&cfg).unwrap();
        assert!(candidate_edges(&g, Orientation::Parallel).is_empty());
        let c = grow_step(&mut g, 0.0, &ClassFirst, &mut seeded_rng(3)).unwrap();
        assert_eq!(c.orientation, Orientation::Normal);
        assert!(c.fallback);
    }

    #[test]
    fn first_step_with_p_n_one() {
        let cfg = GrowthConfig::new(10, 9, 1.0, 20, 3);
        let mut g = initialize_axis(&cfg).unwrap();
        let c = grow_step(&mut g, 1.0, &ClassFirst, &mut seeded_rng(3)).unwrap();
        assert_eq!(c.orientation, Orientation::Normal);
        assert!(!c.fallback);
    }

    #[test]
    fn saturated_region_errors() {
        let cfg = GrowthConfig::new(3, 2, 0.5, 7, 0);
        let (mut g, _) = grow_to(&cfg, &ClassFirst).unwrap();
        assert_eq!(g.edge_count(), g.edge_capacity());
        assert!(matches!(
            grow_step(&mut g, 0.5, &ClassFirst, &mut seeded_rng(0)),
            Err(Error::Saturated { .. })
        ));
    }

    #[test]
    fn target_bounds_are_validated() {
        assert!(GrowthConfig::new(60, 50, 0.5, 58, 0).validate().is_err());
        assert!(GrowthConfig::new(60, 50, 0.5, 59, 0).validate().is_ok());
        let cap = lattice_capacity(60, 50);
        assert!(GrowthConfig::new(60, 50, 0.5, cap + 1, 0)
            .validate()
            .is_err());
        assert!(GrowthConfig::new(60, 50, 1.5, 100, 0).validate().is_err());
    }

    #[test]
    fn stage_accounting_without_axis_edges() {
        let mut cfg = GrowthConfig::new(10, 9, 0.5, 30, 1);
        cfg.count_axis_edges = false;
        let (g, trace) = grow_to(&cfg, &ClassFirst).unwrap();
        assert_eq!(g.edge_count(), 39);
        assert_eq!(trace.len(), 30);
    }

    #[test]
    fn trace_steps_are_consecutive_and_distinct() {
        let (g, trace) = grow_to(&GrowthConfig::new(20, 15, 0.5, 150, 11), &ClassFirst).unwrap();
        assert_eq!(trace.len(), 150 - 19);
        for (i, s) in trace.steps.iter().enumerate() {
            assert_eq!(s.step, i + 1);
            assert_eq!(s.orientation, s.edge.orientation());
        }
        let mut edges: Vec<_> = trace.steps.iter().map(|s| s.edge).collect();
        edges.sort_unstable();
        edges.dedup();
        assert_eq!(edges.len(), trace.len());
        assert!(is_connected(&g));
    }

    #[test]
    fn trace_csv_format() {
        let (_, trace) = grow_to(&GrowthConfig::new(3, 3, 1.0, 3, 0), &ClassFirst).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,x1,y1,x2,y2,orientation,fallback"));
        let row: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "1");
        assert_eq!(row[5], "normal");
        assert_eq!(row[6], "false");
    }

    #[test]
    fn above_keeps_nodes_on_one_side() {
        let mut cfg = GrowthConfig::new(12, 11, 0.7, 120, 5);
        cfg.sides = Sides::Above;
        let (g, _) = grow_to(&cfg, &ClassFirst).unwrap();
        assert!(g.sites().iter().all(|s| s.y >= cfg.y_axis()));
    }

    #[test]
    fn incremental_pool_matches_full_scan() {
        for sampler in [&ClassFirst as &dyn EdgeSampler, &PerEdgeWeighted] {
            let cfg = GrowthConfig::new(15, 11, 0.4, 200, 21);
            let mut grower = Grower::new(&cfg, sampler).unwrap();
            let mut reference = initialize_axis(&cfg).unwrap();
            let mut rng = seeded_rng(cfg.seed);
            while grower.graph().edge_count() < 200 {
                assert_eq!(
                    grower.candidates(),
                    &CandidatePool::from_graph(grower.graph())
                );
                let a = grower.step().unwrap();
                let b = grow_step(&mut reference, cfg.p_n, sampler, &mut rng).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn checkpoints_are_nested() {
        let cfg = GrowthConfig::new(20, 16, 0.5, 300, 8);
        let (snaps, _) = grow_checkpoints(&cfg, &ClassFirst, &[300, 100, 200]).unwrap();
        assert_eq!(
            snaps.iter().map(|s| s.0).collect::<Vec<_>>(),
            vec![100, 200, 300]
        );
        for w in snaps.windows(2) {
            let later: std::collections::HashSet<_> = w[1].1.edges().into_iter().collect();
            assert!(w[0].1.edges().iter().all(|e| later.contains(e)));
        }
        let (full, _) = grow_to(&cfg, &ClassFirst).unwrap();
        assert_eq!(full.edges(), snaps[2].1.edges());
    }

    #[test]
    fn run_seeds_differ_and_repeat() {
        assert_eq!(derive_run_seed(1, 0), derive_run_seed(1, 0));
        assert_ne!(derive_run_seed(1, 0), derive_run_seed(1, 1));
        assert_ne!(derive_run_seed(1, 0), derive_run_seed(2, 0));
    }
}
