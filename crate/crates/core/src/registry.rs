//! Name-keyed registries for the interchangeable strategies: edge samplers
//! for growth and ring normalizations for accessibility.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::accessibility::{Normalization, RawMasses, RingNormalized};
use crate::error::{Error, Result};
use crate::sampler::{ClassFirst, EdgeSampler, PerEdgeWeighted};

/// Anything that can be registered and looked up by name.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str {
        ""
    }
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: Strategy + ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Registers `strategy`, replacing any entry with the same name.
    pub fn register(&mut self, strategy: Arc<T>) -> &mut Self {
        self.entries.insert(strategy.name(), strategy);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_owned(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<T>> {
        self.entries.values()
    }
}

pub const DEFAULT_SAMPLER: &str = "per-edge";
pub const DEFAULT_NORMALIZATION: &str = "ring";

pub fn samplers() -> Registry<dyn EdgeSampler> {
    let mut r: Registry<dyn EdgeSampler> = Registry::new("sampler");
    r.register(Arc::new(ClassFirst))
        .register(Arc::new(PerEdgeWeighted));
    r
}

pub fn normalizations() -> Registry<dyn Normalization> {
    let mut r: Registry<dyn Normalization> = Registry::new("normalization");
    r.register(Arc::new(RingNormalized))
        .register(Arc::new(RawMasses));
    r
}
