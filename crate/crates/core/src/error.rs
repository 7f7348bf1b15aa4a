use crate::lattice::{LatticeGraph, Site};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sites {0} and {1} are not lattice-adjacent")]
    InvalidEdge(Site, Site),

    #[error("edge {0}-{1} already present")]
    DuplicateEdge(Site, Site),

    #[error(
        "site {site} lies outside the allowed region (width {width}, rows {rows_lo}..={rows_hi})"
    )]
    OutOfBounds {
        site: Site,
        width: u32,
        rows_lo: u32,
        rows_hi: u32,
    },

    #[error("edge {0}-{1} is not attached to the existing structure")]
    Detached(Site, Site),

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("hierarchy must be at least 1, got {0}")]
    InvalidHierarchy(usize),

    #[error("node {0} has degree 0 but carries walk mass")]
    DegenerateGraph(usize),

    #[error("ring of node {node} at h={h} is nonempty but received no walk mass")]
    NotReached { node: usize, h: usize },

    #[error("no candidate edges remain (saturated at {edges} edges, target {target})")]
    Saturated {
        edges: usize,
        target: usize,
        graph: Box<LatticeGraph>,
    },

    #[error("measurement region contains no nodes")]
    EmptyRegion,

    #[error("unknown {kind} strategy `{name}` (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("run {run} (seed {seed}): {source}")]
    Run {
        run: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::UnknownStrategy { .. }
            | Error::InvalidHierarchy(_) => true,
            Error::Run { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
