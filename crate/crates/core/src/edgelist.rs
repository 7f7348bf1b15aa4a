//! Plain-text structure files.
//!
//! ```text
//! # L=60 H=50 y_axis=25 e=1500 seed=42 p_n=0.5
//! 0 25 1 25
//! 0 25 0 26
//! ```
//!
//! Edges are written in canonical order, one `x1 y1 x2 y2` per line.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::GraphView;
use crate::lattice::{LatticeGraph, Site};

/// Header fields of a structure file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureMeta {
    pub width: u32,
    pub height: u32,
    pub y_axis: u32,
    pub seed: u64,
    pub p_n: f64,
}

#[derive(Debug, Clone)]
pub struct Structure {
    pub meta: StructureMeta,
    pub graph: LatticeGraph,
}

pub fn write_structure<W: Write>(
    out: &mut W,
    graph: &LatticeGraph,
    seed: u64,
    p_n: f64,
) -> Result<()> {
    writeln!(
        out,
        "# L={} H={} y_axis={} e={} seed={} p_n={}",
        graph.width(),
        graph.height(),
        graph.y_axis(),
        graph.edge_count(),
        seed,
        p_n
    )?;
    for e in graph.edges() {
        writeln!(out, "{} {} {} {}", e.lo.x, e.lo.y, e.hi.x, e.hi.y)?;
    }
    Ok(())
}

pub fn read_structure<R: BufRead>(input: R) -> Result<Structure> {
    let mut lines = input.lines().enumerate();
    let (meta, declared_edges) = loop {
        match lines.next() {
            None => return Err(Error::parse(1, "empty structure file")),
            Some((i, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break parse_header(i + 1, &line)?;
            }
        }
    };
    let mut graph = LatticeGraph::new(meta.width, meta.height, meta.y_axis)
        .map_err(|e| Error::parse(1, e.to_string()))?;
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let nums: Vec<u32> = trimmed
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(lineno, format!("invalid coordinate `{t}`")))
            })
            .collect::<Result<_>>()?;
        let [x1, y1, x2, y2] = nums[..] else {
            return Err(Error::parse(
                lineno,
                format!("expected 4 coordinates, found {}", nums.len()),
            ));
        };
        graph
            .insert_edge(Site::new(x1, y1), Site::new(x2, y2))
            .map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    if graph.edge_count() != declared_edges {
        return Err(Error::parse(
            1,
            format!(
                "header declares e={declared_edges} but file lists {} edges",
                graph.edge_count()
            ),
        ));
    }
    Ok(Structure { meta, graph })
}

fn parse_header(lineno: usize, line: &str) -> Result<(StructureMeta, usize)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::parse(lineno, "missing `# L=.. H=..` header"))?;
    let mut width = None;
    let mut height = None;
    let mut y_axis = None;
    let mut edges = None;
    let mut seed = None;
    let mut p_n = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, format!("malformed header field `{field}`")))?;
        let bad = || Error::parse(lineno, format!("invalid value for `{key}`: `{value}`"));
        match key {
            "L" => width = Some(value.parse().map_err(|_| bad())?),
            "H" => height = Some(value.parse().map_err(|_| bad())?),
            "y_axis" => y_axis = Some(value.parse().map_err(|_| bad())?),
            "e" => edges = Some(value.parse().map_err(|_| bad())?),
            "seed" => seed = Some(value.parse().map_err(|_| bad())?),
            "p_n" => p_n = Some(value.parse().map_err(|_| bad())?),
            _ => {
                return Err(Error::parse(
                    lineno,
                    format!("unknown header field `{key}`"),
                ))
            }
        }
    }
    let missing = |k: &str| Error::parse(lineno, format!("header missing `{k}`"));
    Ok((
        StructureMeta {
            width: width.ok_or_else(|| missing("L"))?,
            height: height.ok_or_else(|| missing("H"))?,
            y_axis: y_axis.ok_or_else(|| missing("y_axis"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            p_n: p_n.ok_or_else(|| missing("p_n"))?,
        },
        edges.ok_or_else(|| missing("e"))?,
    ))
}
