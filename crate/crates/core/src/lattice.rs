//! The growing structure: a simple graph embedded in an `L x H` orthogonal
//! lattice. The reference axis runs along `x`; `y` counts rows.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{self, GraphView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: u32,
    pub y: u32,
}

impl Site {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Direction of a lattice edge relative to the reference axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Parallel,
    Normal,
}

impl Orientation {
    pub fn other(self) -> Self {
        match self {
            Orientation::Parallel => Orientation::Normal,
            Orientation::Normal => Orientation::Parallel,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Parallel => "parallel",
            Orientation::Normal => "normal",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn edge_orientation(a: Site, b: Site) -> Result<Orientation> {
    match (a.x.abs_diff(b.x), a.y.abs_diff(b.y)) {
        (1, 0) => Ok(Orientation::Parallel),
        (0, 1) => Ok(Orientation::Normal),
        _ => Err(Error::InvalidEdge(a, b)),
    }
}

/// An undirected lattice edge stored with `lo < hi`. The derived ordering is
/// the canonical candidate order: by the smaller endpoint, then the larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub lo: Site,
    pub hi: Site,
}

impl Edge {
    pub fn new(a: Site, b: Site) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn orientation(&self) -> Orientation {
        if self.lo.y == self.hi.y {
            Orientation::Parallel
        } else {
            Orientation::Normal
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Lattice-constrained simple graph. Nodes get dense indices in insertion
/// order; neighbor lists hold indices.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    width: u32,
    height: u32,
    y_axis: u32,
    rows: (u32, u32),
    sites: Vec<Site>,
    index: HashMap<Site, usize>,
    adjacency: Vec<Vec<usize>>,
    edges: usize,
}

impl LatticeGraph {
    /// An empty `width x height` lattice with the axis at `y_axis`.
    pub fn new(width: u32, height: u32, y_axis: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::config(format!(
                "lattice dimensions must be positive, got {width}x{height}"
            )));
        }
        if y_axis >= height {
            return Err(Error::config(format!(
                "axis row {y_axis} outside height {height}"
            )));
        }
        Ok(Self {
            width,
            height,
            y_axis,
            rows: (0, height - 1),
            sites: Vec::new(),
            index: HashMap::new(),
            adjacency: Vec::new(),
            edges: 0,
        })
    }

    /// Restricts future edges to rows `lo..=hi`.
    pub fn with_rows(mut self, lo: u32, hi: u32) -> Result<Self> {
        if lo > hi || hi >= self.height {
            return Err(Error::config(format!(
                "row range {lo}..={hi} invalid for height {}",
                self.height
            )));
        }
        if let Some(s) = self.sites.iter().find(|s| s.y < lo || s.y > hi) {
            return Err(Error::config(format!(
                "existing node {s} outside rows {lo}..={hi}"
            )));
        }
        self.rows = (lo, hi);
        Ok(self)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn y_axis(&self) -> u32 {
        self.y_axis
    }

    pub fn rows(&self) -> (u32, u32) {
        self.rows
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn site(&self, index: usize) -> Site {
        self.sites[index]
    }

    pub fn index_of(&self, site: Site) -> Option<usize> {
        self.index.get(&site).copied()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.index.contains_key(&site)
    }

    pub fn in_bounds(&self, site: Site) -> bool {
        site.x < self.width && site.y >= self.rows.0 && site.y <= self.rows.1
    }

    pub fn has_edge(&self, a: Site, b: Site) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i].contains(&j),
            _ => false,
        }
    }

    pub fn site_degree(&self, site: Site) -> Option<usize> {
        self.index_of(site).map(|i| self.adjacency[i].len())
    }

    /// All edges in canonical order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edges);
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            for &j in nbrs {
                let e = Edge::new(self.sites[i], self.sites[j]);
                if e.lo == self.sites[i] {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Maximum number of lattice edges inside the allowed rows.
    pub fn edge_capacity(&self) -> usize {
        lattice_capacity(self.width, self.rows.1 - self.rows.0 + 1)
    }

    /// Adds a lattice edge. Once the graph has nodes, one endpoint must
    /// already belong to it. Returns the endpoints that became new nodes.
    pub fn add_edge(&mut self, a: Site, b: Site) -> Result<Vec<Site>> {
        if !self.sites.is_empty() && !self.contains(a) && !self.contains(b) {
            return Err(Error::Detached(a, b));
        }
        self.insert_edge(a, b)
    }

    /// Adds an edge without the attachment rule; used when loading files.
    pub(crate) fn insert_edge(&mut self, a: Site, b: Site) -> Result<Vec<Site>> {
        edge_orientation(a, b)?;
        for s in [a, b] {
            if !self.in_bounds(s) {
                return Err(Error::OutOfBounds {
                    site: s,
                    width: self.width,
                    rows_lo: self.rows.0,
                    rows_hi: self.rows.1,
                });
            }
        }
        if self.has_edge(a, b) {
            return Err(Error::DuplicateEdge(a, b));
        }
        let mut created = Vec::new();
        let i = self.intern(a, &mut created);
        let j = self.intern(b, &mut created);
        self.adjacency[i].push(j);
        self.adjacency[j].push(i);
        self.edges += 1;
        Ok(created)
    }

    fn intern(&mut self, site: Site, created: &mut Vec<Site>) -> usize {
        if let Some(&i) = self.index.get(&site) {
            return i;
        }
        let i = self.sites.len();
        self.sites.push(site);
        self.index.insert(site, i);
        self.adjacency.push(Vec::new());
        created.push(site);
        i
    }

    /// Lattice neighbors of `site` inside the allowed region (occupied or not).
    pub fn lattice_neighbors(&self, site: Site) -> impl Iterator<Item = Site> + '_ {
        let Site { x, y } = site;
        [
            x.checked_sub(1).map(|x| Site::new(x, y)),
            Some(Site::new(x + 1, y)),
            y.checked_sub(1).map(|y| Site::new(x, y)),
            Some(Site::new(x, y + 1)),
        ]
        .into_iter()
        .flatten()
        .filter(move |s| self.in_bounds(*s))
    }

    /// Site-level hierarchical neighborhoods; see [`graph::bfs_rings`].
    pub fn bfs_rings(&self, source: Site, h_max: usize) -> Result<Vec<Vec<Site>>> {
        let src = self
            .index_of(source)
            .ok_or_else(|| Error::UnknownNode(source.to_string()))?;
        let rings = graph::bfs_rings(self, src, h_max)?;
        Ok(rings
            .into_iter()
            .map(|r| {
                let mut sites: Vec<Site> = r.into_iter().map(|i| self.sites[i]).collect();
                sites.sort_unstable();
                sites
            })
            .collect())
    }
}

impl GraphView for LatticeGraph {
    fn node_count(&self) -> usize {
        self.sites.len()
    }

    fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    fn edge_count(&self) -> usize {
        self.edges
    }
}

/// Number of edges in a full `width x rows` lattice block.
pub fn lattice_capacity(width: u32, rows: u32) -> usize {
    let (w, r) = (width as usize, rows as usize);
    (w - 1) * r + w * (r - 1)
}

/// Every absent lattice edge of `orientation` inside the allowed region that
/// touches at least one node, in canonical order.
///
/// This is a full scan over the node set. Growth keeps the same set
/// incrementally in a `CandidatePool`.
pub fn candidate_edges(graph: &LatticeGraph, orientation: Orientation) -> Vec<Edge> {
    let mut out: Vec<Edge> = graph
        .sites()
        .iter()
        .flat_map(|&s| graph.lattice_neighbors(s).map(move |t| Edge::new(s, t)))
        .filter(|e| e.orientation() == orientation && !graph.has_edge(e.lo, e.hi))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    fn axis(width: u32, height: u32, y: u32) -> LatticeGraph {
        let mut g = LatticeGraph::new(width, height, y).unwrap();
        for x in 1..width {
            g.add_edge(Site::new(x - 1, y), Site::new(x, y)).unwrap();
        }
        g
    }

    fn full_block(width: u32, height: u32) -> LatticeGraph {
        let mut g = LatticeGraph::new(width, height, 0).unwrap();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    g.insert_edge(Site::new(x, y), Site::new(x + 1, y)).unwrap();
                }
                if y + 1 < height {
                    g.insert_edge(Site::new(x, y), Site::new(x, y + 1)).unwrap();
                }
            }
        }
        g
    }

    #[test]
    fn orientation_of_edges() {
        let a = Site::new(3, 5);
        assert_eq!(
            edge_orientation(a, Site::new(4, 5)).unwrap(),
            Orientation::Parallel
        );
        assert_eq!(
            edge_orientation(a, Site::new(3, 6)).unwrap(),
            Orientation::Normal
        );
        assert!(matches!(
            edge_orientation(a, Site::new(4, 6)),
            Err(Error::InvalidEdge(..))
        ));
        assert!(edge_orientation(a, a).is_err());
        assert!(edge_orientation(a, Site::new(5, 5)).is_err());
    }

    #[test]
    fn add_edge_to_empty_graph() {
        let mut g = LatticeGraph::new(60, 50, 25).unwrap();
        g.add_edge(Site::new(0, 25), Site::new(1, 25)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
    }

    #[test]
    fn add_edge_errors() {
        let mut g = LatticeGraph::new(60, 26, 25).unwrap();
        g.add_edge(Site::new(0, 25), Site::new(1, 25)).unwrap();
        assert!(matches!(
            g.add_edge(Site::new(1, 25), Site::new(0, 25)),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            g.add_edge(Site::new(0, 25), Site::new(0, 26)),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(
            g.add_edge(Site::new(5, 5), Site::new(5, 6)),
            Err(Error::Detached(..))
        ));
        assert!(matches!(
            g.add_edge(Site::new(0, 25), Site::new(1, 26)),
            Err(Error::InvalidEdge(..))
        ));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn add_edge_creates_new_endpoint() {
        let mut g = LatticeGraph::new(60, 50, 25).unwrap();
        g.add_edge(Site::new(0, 25), Site::new(1, 25)).unwrap();
        let created = g.add_edge(Site::new(0, 25), Site::new(0, 26)).unwrap();
        assert_eq!(created, vec![Site::new(0, 26)]);
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn candidates_on_axis_only_graph() {
        let g = axis(3, 3, 1);
        assert!(candidate_edges(&g, Orientation::Parallel).is_empty());
        let normal = candidate_edges(&g, Orientation::Normal);
        assert_eq!(
            normal,
            vec![
                Edge::new(Site::new(0, 0), Site::new(0, 1)),
                Edge::new(Site::new(0, 1), Site::new(0, 2)),
                Edge::new(Site::new(1, 0), Site::new(1, 1)),
                Edge::new(Site::new(1, 1), Site::new(1, 2)),
                Edge::new(Site::new(2, 0), Site::new(2, 1)),
                Edge::new(Site::new(2, 1), Site::new(2, 2)),
            ]
        );
    }

    #[test]
    fn candidates_respect_row_restriction() {
        let g = axis(3, 3, 1).with_rows(1, 2).unwrap();
        let normal = candidate_edges(&g, Orientation::Normal);
        assert_eq!(normal.len(), 3);
        assert!(normal.iter().all(|e| e.lo.y >= 1));
    }

    #[test]
    fn saturated_block_has_no_candidates() {
        let g = full_block(4, 3);
        assert_eq!(g.edge_count(), g.edge_capacity());
        assert!(candidate_edges(&g, Orientation::Parallel).is_empty());
        assert!(candidate_edges(&g, Orientation::Normal).is_empty());
    }

    #[test]
    fn block_rings_from_corner() {
        let g = full_block(3, 2);
        let rings = g.bfs_rings(Site::new(0, 0), 3).unwrap();
        let sizes: Vec<_> = rings.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 1]);
        assert_eq!(rings[3], vec![Site::new(2, 1)]);
    }

    #[test]
    fn site_rings_unknown_source() {
        let g = axis(3, 3, 1);
        assert!(g.bfs_rings(Site::new(0, 0), 1).is_err());
    }

    #[test]
    fn candidates_keep_graph_simple_and_connected() {
        let mut g = axis(4, 4, 2);
        g.add_edge(Site::new(1, 2), Site::new(1, 3)).unwrap();
        for o in [Orientation::Parallel, Orientation::Normal] {
            for e in candidate_edges(&g, o) {
                let mut h = g.clone();
                h.add_edge(e.lo, e.hi).unwrap();
                assert!(is_connected(&h));
                assert_eq!(h.edge_count(), g.edge_count() + 1);
            }
        }
    }
}
