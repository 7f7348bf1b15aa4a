//! Edge-selection rules for one growth step.

use rand::{Rng, RngCore};

use crate::lattice::{Edge, Orientation};
use crate::registry::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub edge: Edge,
    pub orientation: Orientation,
    /// The preferred class was empty and the other class supplied the edge.
    pub fallback: bool,
}

/// Picks the next edge from the canonical parallel and normal candidate
/// lists. Returns `None` only when both lists are empty.
pub trait EdgeSampler: Strategy {
    fn choose(
        &self,
        parallel: &[Edge],
        normal: &[Edge],
        p_n: f64,
        rng: &mut dyn RngCore,
    ) -> Option<Choice>;
}

fn class<'a>(o: Orientation, parallel: &'a [Edge], normal: &'a [Edge]) -> &'a [Edge] {
    match o {
        Orientation::Parallel => parallel,
        Orientation::Normal => normal,
    }
}

/// Draws the orientation first (normal with probability `p_n`), then a
/// uniform edge within that class. An empty class falls back to the other.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClassFirst;

impl Strategy for ClassFirst {
    fn name(&self) -> &'static str {
        "class-first"
    }

    fn description(&self) -> &'static str {
        "draw orientation with P(normal)=p_n, then a uniform edge of that orientation"
    }
}

impl EdgeSampler for ClassFirst {
    fn choose(
        &self,
        parallel: &[Edge],
        normal: &[Edge],
        p_n: f64,
        rng: &mut dyn RngCore,
    ) -> Option<Choice> {
        if parallel.is_empty() && normal.is_empty() {
            return None;
        }
        let drawn = if rng.random::<f64>() < p_n {
            Orientation::Normal
        } else {
            Orientation::Parallel
        };
        let (orientation, fallback) = if class(drawn, parallel, normal).is_empty() {
            (drawn.other(), true)
        } else {
            (drawn, false)
        };
        let pool = class(orientation, parallel, normal);
        let edge = pool[rng.random_range(0..pool.len())];
        Some(Choice {
            edge,
            orientation,
            fallback,
        })
    }
}

/// Weights every candidate edge individually by `p_n` (normal) or `1 - p_n`
/// (parallel) and draws one edge from the combined list. When every weight
/// is zero it draws uniformly among all candidates and flags a fallback.
#[derive(Debug, Clone, Copy, Default)]
pub struct PerEdgeWeighted;

impl Strategy for PerEdgeWeighted {
    fn name(&self) -> &'static str {
        "per-edge"
    }

    fn description(&self) -> &'static str {
        "weight each candidate edge by p_n or 1-p_n and draw one edge"
    }
}

impl EdgeSampler for PerEdgeWeighted {
    fn choose(
        &self,
        parallel: &[Edge],
        normal: &[Edge],
        p_n: f64,
        rng: &mut dyn RngCore,
    ) -> Option<Choice> {
        let total = parallel.len() + normal.len();
        if total == 0 {
            return None;
        }
        let w_par = (1.0 - p_n) * parallel.len() as f64;
        let w_nor = p_n * normal.len() as f64;
        if w_par + w_nor <= 0.0 {
            let k = rng.random_range(0..total);
            let (edge, orientation) = if k < parallel.len() {
                (parallel[k], Orientation::Parallel)
            } else {
                (normal[k - parallel.len()], Orientation::Normal)
            };
            return Some(Choice {
                edge,
                orientation,
                fallback: true,
            });
        }
        let orientation = if rng.random::<f64>() * (w_par + w_nor) < w_nor {
            Orientation::Normal
        } else {
            Orientation::Parallel
        };
        let pool = class(orientation, parallel, normal);
        Some(Choice {
            edge: pool[rng.random_range(0..pool.len())],
            orientation,
            fallback: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Site;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn edges(o: Orientation, n: u32) -> Vec<Edge> {
        (0..n)
            .map(|i| match o {
                Orientation::Parallel => Edge::new(Site::new(i, 0), Site::new(i + 1, 0)),
                Orientation::Normal => Edge::new(Site::new(i, 0), Site::new(i, 1)),
            })
            .collect()
    }

    #[test]
    fn class_first_falls_back_when_class_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let normal = edges(Orientation::Normal, 3);
        let c = ClassFirst.choose(&[], &normal, 0.0, &mut rng).unwrap();
        assert_eq!(c.orientation, Orientation::Normal);
        assert!(c.fallback);
        let c = ClassFirst.choose(&[], &normal, 1.0, &mut rng).unwrap();
        assert!(!c.fallback);
    }

    #[test]
    fn both_empty_yields_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(ClassFirst.choose(&[], &[], 0.5, &mut rng).is_none());
        assert!(PerEdgeWeighted.choose(&[], &[], 0.5, &mut rng).is_none());
    }

    #[test]
    fn class_first_frequency_ignores_class_sizes() {
        // 1 parallel vs 9 normal candidates: class-first still picks normal ~p_n.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let par = edges(Orientation::Parallel, 1);
        let nor = edges(Orientation::Normal, 9);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| {
                ClassFirst
                    .choose(&par, &nor, 0.3, &mut rng)
                    .unwrap()
                    .orientation
                    == Orientation::Normal
            })
            .count();
        let f = hits as f64 / n as f64;
        assert!((f - 0.3).abs() < 0.02, "{f}");
    }

    #[test]
    fn per_edge_frequency_scales_with_class_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let par = edges(Orientation::Parallel, 1);
        let nor = edges(Orientation::Normal, 9);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| {
                PerEdgeWeighted
                    .choose(&par, &nor, 0.3, &mut rng)
                    .unwrap()
                    .orientation
                    == Orientation::Normal
            })
            .count();
        // 0.3*9 / (0.3*9 + 0.7*1)
        let expected = 2.7 / 3.4;
        let f = hits as f64 / n as f64;
        assert!((f - expected).abs() < 0.02, "{f} vs {expected}");
    }

    #[test]
    fn per_edge_zero_weight_falls_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let nor = edges(Orientation::Normal, 2);
        let c = PerEdgeWeighted.choose(&[], &nor, 0.0, &mut rng).unwrap();
        assert!(c.fallback);
        assert_eq!(c.orientation, Orientation::Normal);
    }
}
