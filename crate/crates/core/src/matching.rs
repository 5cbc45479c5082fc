//! Graph decoupling: maximum-cardinality bipartite matching.
//!
//! Free sources are seeded in ascending id order. Each seed runs a
//! breadth-first alternating search: all neighbors of the popped source are
//! scanned (ascending) for a free destination before the partners of matched
//! neighbors are queued. The first free destination found ends the search and
//! the path is flipped back through the recorded predecessors.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{SemanticGraph, VertexId};

const UNMATCHED: VertexId = VertexId::MAX;

/// Partner maps over both roles. `src_partner[u] == v` iff `dst_partner[v] == u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    src_partner: Vec<VertexId>,
    dst_partner: Vec<VertexId>,
    size: usize,
}

impl Matching {
    pub fn empty(num_src: usize, num_dst: usize) -> Self {
        Matching {
            src_partner: vec![UNMATCHED; num_src],
            dst_partner: vec![UNMATCHED; num_dst],
            size: 0,
        }
    }

    /// Builds a matching from explicit pairs, rejecting shared endpoints.
    pub fn from_pairs(
        num_src: usize,
        num_dst: usize,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut m = Matching::empty(num_src, num_dst);
        for (u, v) in pairs {
            if u as usize >= num_src || v as usize >= num_dst {
                return Err(Error::Contract(format!("pair ({u}, {v}) out of range")));
            }
            if m.src_partner[u as usize] != UNMATCHED || m.dst_partner[v as usize] != UNMATCHED {
                return Err(Error::Contract(format!(
                    "pair ({u}, {v}) reuses a matched vertex"
                )));
            }
            m.src_partner[u as usize] = v;
            m.dst_partner[v as usize] = u;
            m.size += 1;
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_src(&self) -> usize {
        self.src_partner.len()
    }

    pub fn num_dst(&self) -> usize {
        self.dst_partner.len()
    }

    pub fn src_partner(&self, u: VertexId) -> Option<VertexId> {
        Some(self.src_partner[u as usize]).filter(|&v| v != UNMATCHED)
    }

    pub fn dst_partner(&self, v: VertexId) -> Option<VertexId> {
        Some(self.dst_partner[v as usize]).filter(|&u| u != UNMATCHED)
    }

    pub fn is_src_matched(&self, u: VertexId) -> bool {
        self.src_partner[u as usize] != UNMATCHED
    }

    pub fn is_dst_matched(&self, v: VertexId) -> bool {
        self.dst_partner[v as usize] != UNMATCHED
    }

    /// Matched pairs in ascending source order.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.src_partner
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNMATCHED)
            .map(|(u, &v)| (u as VertexId, v))
    }

    /// Checks dimensions, involution and edge membership against `g`.
    pub fn validate(&self, g: &SemanticGraph) -> Result<()> {
        if self.num_src() != g.num_src() || self.num_dst() != g.num_dst() {
            return Err(Error::Contract(format!(
                "matching dimensions {}x{} do not match graph {}x{}",
                self.num_src(),
                self.num_dst(),
                g.num_src(),
                g.num_dst()
            )));
        }
        let mut count = 0;
        for (u, v) in self.pairs() {
            if self.dst_partner[v as usize] != u {
                return Err(Error::Contract(format!(
                    "partner maps disagree at ({u}, {v})"
                )));
            }
            if !g.has_edge(u, v) {
                return Err(Error::Contract(format!(
                    "matched pair ({u}, {v}) is not an edge"
                )));
            }
            count += 1;
        }
        let dst_count = self.dst_partner.iter().filter(|&&u| u != UNMATCHED).count();
        if count != self.size || dst_count != self.size {
            return Err(Error::Contract("matching size is inconsistent".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "size = {}", self.size);
        let _ = writeln!(out, "# src dst");
        for (u, v) in self.pairs() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Queue-operation tallies of one decoupling run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecouplerEvents {
    /// A source recorded as predecessor of a newly reached destination.
    pub pushes: u64,
    /// A previously matched pair replaced while flipping an augmenting path.
    pub pops: u64,
    /// Neighbor probes against the visited and partner tables.
    pub lookups: u64,
}

impl DecouplerEvents {
    pub fn total(&self) -> u64 {
        self.pushes + self.pops + self.lookups
    }
}

impl std::ops::AddAssign for DecouplerEvents {
    fn add_assign(&mut self, rhs: Self) {
        self.pushes += rhs.pushes;
        self.pops += rhs.pops;
        self.lookups += rhs.lookups;
    }
}

pub fn max_matching(g: &SemanticGraph) -> Matching {
    max_matching_with_events(g).0
}

pub fn decoupler_event_counts(g: &SemanticGraph) -> DecouplerEvents {
    max_matching_with_events(g).1
}

pub fn max_matching_with_events(g: &SemanticGraph) -> (Matching, DecouplerEvents) {
    let mut m = Matching::empty(g.num_src(), g.num_dst());
    let mut ev = DecouplerEvents::default();

    // pred[v]: source through which v was reached in the current search.
    let mut pred = vec![UNMATCHED; g.num_dst()];
    let mut seen = vec![0u32; g.num_dst()];
    let mut epoch = 0u32;
    let mut queue = VecDeque::new();

    for seed in 0..g.num_src() as VertexId {
        if m.is_src_matched(seed) || g.out_degree(seed) == 0 {
            continue;
        }
        epoch += 1;
        queue.clear();
        queue.push_back(seed);
        let mut free_dst = None;
        'search: while let Some(u) = queue.pop_front() {
            for &v in g.out_neighbors(u) {
                ev.lookups += 1;
                if seen[v as usize] == epoch {
                    continue;
                }
                seen[v as usize] = epoch;
                pred[v as usize] = u;
                ev.pushes += 1;
                match m.dst_partner(v) {
                    None => {
                        free_dst = Some(v);
                        break 'search;
                    }
                    Some(w) => queue.push_back(w),
                }
            }
        }

        let Some(mut v) = free_dst else { continue };
        loop {
            let u = pred[v as usize];
            let previous = m.src_partner[u as usize];
            m.src_partner[u as usize] = v;
            m.dst_partner[v as usize] = u;
            if previous == UNMATCHED {
                break;
            }
            ev.pops += 1;
            v = previous;
        }
        m.size += 1;
    }
    (m, ev)
}

/// Largest edge count accepted by [`brute_force_matching_size`].
pub const BRUTE_FORCE_EDGE_LIMIT: usize = 24;

/// Exact maximum matching size by enumerating vertex-disjoint edge subsets.
pub fn brute_force_matching_size(g: &SemanticGraph) -> Result<usize> {
    if g.num_edges() > BRUTE_FORCE_EDGE_LIMIT {
        return Err(Error::TooLarge {
            edges: g.num_edges(),
            limit: BRUTE_FORCE_EDGE_LIMIT,
        });
    }
    fn best(edges: &[(VertexId, VertexId)], used_src: &mut [bool], used_dst: &mut [bool]) -> usize {
        let Some((&(u, v), rest)) = edges.split_first() else {
            return 0;
        };
        let without = best(rest, used_src, used_dst);
        if used_src[u as usize] || used_dst[v as usize] {
            return without;
        }
        used_src[u as usize] = true;
        used_dst[v as usize] = true;
        let with = 1 + best(rest, used_src, used_dst);
        used_src[u as usize] = false;
        used_dst[v as usize] = false;
        with.max(without)
    }
    let mut used_src = vec![false; g.num_src()];
    let mut used_dst = vec![false; g.num_dst()];
    Ok(best(g.edges(), &mut used_src, &mut used_dst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(ns: usize, nd: usize, edges: &[(u32, u32)]) -> SemanticGraph {
        SemanticGraph::from_edges(ns, nd, edges.iter().copied()).unwrap()
    }

    fn complete(ns: usize, nd: usize) -> SemanticGraph {
        let edges: Vec<_> = (0..ns as u32)
            .flat_map(|u| (0..nd as u32).map(move |v| (u, v)))
            .collect();
        graph(ns, nd, &edges)
    }

    #[test]
    fn star_matches_once() {
        let g = graph(1, 4, &[(0, 0), (0, 1), (0, 2), (0, 3)]);
        let m = max_matching(&g);
        assert_eq!(m.size(), 1);
        assert_eq!(m.src_partner(0), Some(0));
    }

    #[test]
    fn path_pairs_are_deterministic() {
        let g = graph(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        let m = max_matching(&g);
        assert_eq!(m.size(), 2);
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert_eq!(brute_force_matching_size(&g).unwrap(), 2);
    }

    #[test]
    fn four_cycle() {
        let g = complete(2, 2);
        assert_eq!(max_matching(&g).size(), 2);
        assert_eq!(brute_force_matching_size(&g).unwrap(), 2);
    }

    #[test]
    fn empty_graph() {
        let g = graph(3, 3, &[]);
        let m = max_matching(&g);
        assert_eq!(m.size(), 0);
        assert_eq!(decoupler_event_counts(&g), DecouplerEvents::default());
    }

    #[test]
    fn augmenting_path_rematches() {
        // s0 grabs d0 first; s1 only reaches d0, so s0 must move to d1.
        let g = graph(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        let (m, ev) = max_matching_with_events(&g);
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(ev.pops, 1);
        m.validate(&g).unwrap();
    }

    #[test]
    fn brute_force_fixtures() {
        assert_eq!(brute_force_matching_size(&complete(2, 3)).unwrap(), 2);
        assert_eq!(
            brute_force_matching_size(&graph(1, 1, &[(0, 0)])).unwrap(),
            1
        );
        assert_eq!(brute_force_matching_size(&complete(3, 3)).unwrap(), 3);
    }

    #[test]
    fn brute_force_refuses_large_graphs() {
        let err = brute_force_matching_size(&complete(5, 5)).unwrap_err();
        assert!(matches!(
            err,
            Error::TooLarge {
                edges: 25,
                limit: 24
            }
        ));
    }

    #[test]
    fn single_edge_events() {
        let ev = decoupler_event_counts(&graph(1, 1, &[(0, 0)]));
        assert_eq!((ev.pushes, ev.pops), (1, 0));
    }

    #[test]
    fn star_events() {
        let ev = decoupler_event_counts(&graph(1, 3, &[(0, 0), (0, 1), (0, 2)]));
        assert!(ev.pushes >= 1);
        assert_eq!(ev.pops, 0);
    }

    #[test]
    fn from_pairs_rejects_shared_vertices() {
        assert!(Matching::from_pairs(2, 2, [(0, 0), (1, 0)]).is_err());
        let m = Matching::from_pairs(2, 2, [(0, 1)]).unwrap();
        assert_eq!(m.dst_partner(1), Some(0));
    }

    #[test]
    fn validate_rejects_non_edges() {
        let g = graph(2, 2, &[(0, 0)]);
        let m = Matching::from_pairs(2, 2, [(1, 1)]).unwrap();
        assert!(matches!(m.validate(&g), Err(Error::Contract(_))));
    }

    #[test]
    fn text_lists_sorted_pairs() {
        let g = graph(3, 3, &[(2, 0), (0, 1), (1, 2)]);
        let text = max_matching(&g).to_text();
        assert_eq!(text, "size = 3\n# src dst\n0 1\n1 2\n2 0\n");
    }
}
