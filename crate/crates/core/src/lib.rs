//! Radial growth of lattice networks around a straight axis, and their
//! characterization by node accessibility.
//!
//! A structure starts as a chain of `L` nodes on the middle row of an
//! `L x H` lattice. Each growth step attaches one lattice edge to the
//! structure, preferring normal edges with probability `p_n` and parallel
//! edges otherwise. Accessibility at hierarchy `h` is the exponential
//! entropy of the exact `h`-step random-walk probabilities over the nodes at
//! distance `h`; at `h = 1` it equals the degree.
//!
//! Interchangeable pieces (edge samplers, ring normalizations) are looked up
//! by name in [`registry`].

pub mod accessibility;
pub mod analysis;
pub mod config;
pub mod edgelist;
pub mod error;
pub mod graph;
pub mod growth;
pub mod lattice;
pub mod registry;
pub mod sampler;
pub mod stats;

pub use accessibility::{
    accessibility, accessibility_field, accessibility_fields, walk_distribution,
    AccessibilityField, Normalization, WalkDistribution,
};
pub use analysis::{
    ensemble, sweep_pn, EnsembleConfig, EnsembleResult, EnsembleSummary, MeasurementRegion,
};
pub use error::{Error, Result};
pub use graph::{GraphView, SimpleGraph};
pub use growth::{grow_checkpoints, grow_to, initialize_axis, GrowthConfig, GrowthTrace, Sides};
pub use lattice::{candidate_edges, edge_orientation, Edge, LatticeGraph, Orientation, Site};
pub use sampler::EdgeSampler;
