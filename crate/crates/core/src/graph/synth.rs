use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use super::{Relation, SemanticGraph, VertexId};
use crate::error::{Error, Result};

pub const DEFAULT_ZIPF_EXPONENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Edge set drawn uniformly among all `num_edges`-subsets.
    Uniform,
    /// Sources uniform, destinations drawn with Zipf skew over a seeded
    /// permutation of destination ids.
    PowerLaw { exponent: f64 },
}

impl SyntheticKind {
    pub fn power_law() -> Self {
        SyntheticKind::PowerLaw {
            exponent: DEFAULT_ZIPF_EXPONENT,
        }
    }
}

/// Deterministic synthetic bipartite graph without duplicate edges.
pub fn gen_synthetic(
    kind: SyntheticKind,
    num_src: usize,
    num_dst: usize,
    num_edges: usize,
    seed: u64,
) -> Result<SemanticGraph> {
    let total = num_src
        .checked_mul(num_dst)
        .ok_or_else(|| Error::Infeasible("vertex counts overflow".into()))?;
    if num_edges > total {
        return Err(Error::Infeasible(format!(
            "{num_edges} edges requested but only {total} distinct pairs exist ({num_src} x {num_dst})"
        )));
    }
    if num_src > VertexId::MAX as usize || num_dst > VertexId::MAX as usize {
        return Err(Error::Infeasible("vertex count exceeds id width".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let to_pair = |idx: usize| ((idx / num_dst) as VertexId, (idx % num_dst) as VertexId);

    let edges: Vec<(VertexId, VertexId)> = match kind {
        _ if num_edges == 0 => Vec::new(),
        SyntheticKind::Uniform => index::sample(&mut rng, total, num_edges)
            .into_iter()
            .map(to_pair)
            .collect(),
        SyntheticKind::PowerLaw { exponent } => {
            if exponent.is_nan() || exponent <= 0.0 {
                return Err(Error::Config(format!(
                    "zipf exponent must be positive, got {exponent}"
                )));
            }
            let zipf = Zipf::new(num_dst as f64, exponent)
                .map_err(|e| Error::Config(format!("zipf: {e}")))?;
            let mut rank_to_dst: Vec<VertexId> = (0..num_dst as VertexId).collect();
            rank_to_dst.shuffle(&mut rng);

            let mut seen: HashSet<usize> = HashSet::with_capacity(num_edges);
            let max_attempts = num_edges.saturating_mul(64).saturating_add(10_000);
            let mut attempts = 0usize;
            while seen.len() < num_edges && attempts < max_attempts {
                attempts += 1;
                let rank = (zipf.sample(&mut rng) as usize).clamp(1, num_dst) - 1;
                let dst = rank_to_dst[rank] as usize;
                let src = rng.random_range(0..num_src);
                seen.insert(src * num_dst + dst);
            }
            if seen.len() < num_edges {
                // Near-saturated request: top up uniformly from the complement.
                let free: Vec<usize> = (0..total).filter(|i| !seen.contains(i)).collect();
                let missing = num_edges - seen.len();
                for i in index::sample(&mut rng, free.len(), missing) {
                    seen.insert(free[i]);
                }
            }
            seen.into_iter().map(to_pair).collect()
        }
    };

    let name = match kind {
        SyntheticKind::Uniform => "uniform",
        SyntheticKind::PowerLaw { .. } => "power-law",
    };
    Ok(SemanticGraph::from_edges(num_src, num_dst, edges)?
        .with_relation(Relation::new("src", "dst").named(name)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_full_density_is_complete() {
        for seed in [0, 1, 99] {
            let g = gen_synthetic(SyntheticKind::Uniform, 4, 4, 16, seed).unwrap();
            assert_eq!(g.num_edges(), 16);
            for u in 0..4 {
                assert_eq!(g.out_neighbors(u), &[0, 1, 2, 3]);
            }
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        for kind in [SyntheticKind::Uniform, SyntheticKind::power_law()] {
            let a = gen_synthetic(kind, 100, 100, 500, 7).unwrap();
            let b = gen_synthetic(kind, 100, 100, 500, 7).unwrap();
            assert_eq!(a.edges(), b.edges());
            assert_eq!(a.num_edges(), 500);
            let c = gen_synthetic(kind, 100, 100, 500, 8).unwrap();
            assert_ne!(a.edges(), c.edges());
        }
    }

    #[test]
    fn power_law_is_skewed() {
        let g = gen_synthetic(SyntheticKind::power_law(), 1000, 100, 5000, 1).unwrap();
        assert_eq!(g.num_edges(), 5000);
        let max = (0..100).map(|v| g.in_degree(v)).max().unwrap();
        let mean = 5000.0 / 100.0;
        assert!(max as f64 > 3.0 * mean, "max {max}");
    }

    #[test]
    fn power_law_saturated_request_completes() {
        let g = gen_synthetic(SyntheticKind::power_law(), 10, 10, 100, 3).unwrap();
        assert_eq!(g.num_edges(), 100);
    }

    #[test]
    fn infeasible_edge_count() {
        let err = gen_synthetic(SyntheticKind::Uniform, 3, 3, 10, 0).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn empty_dimensions() {
        let g = gen_synthetic(SyntheticKind::power_law(), 0, 5, 0, 0).unwrap();
        assert!(g.is_empty());
    }
}
