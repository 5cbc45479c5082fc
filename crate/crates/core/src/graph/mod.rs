//! Semantic-graph data model.
//!
//! A [`SemanticGraph`] is a directed bipartite graph: every edge runs from the
//! source role to the destination role. Source ids and destination ids are
//! separate namespaces, so a same-typed relation (paper → paper) still yields a
//! strictly bipartite graph with the vertex set duplicated on both sides.

mod hetero;
mod io;
mod synth;

use std::fmt;

use sha2::{Digest, Sha256};

pub use hetero::{build_semantic_graphs, HetGraph};
pub use io::{load_edge_list, read_graph, write_edge_list, write_graph, GraphMeta};
pub use synth::{gen_synthetic, SyntheticKind, DEFAULT_ZIPF_EXPONENT};

use crate::error::{Error, Result};

/// Role-local vertex index.
pub type VertexId = u32;

/// Bytes per feature element (fp32).
pub const BYTES_PER_ELEMENT: usize = 4;
pub const DEFAULT_FEATURE_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Src,
    Dst,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Src => "source",
            Role::Dst => "destination",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub name: String,
    pub src_type: String,
    pub dst_type: String,
}

impl Relation {
    pub fn new(src_type: impl Into<String>, dst_type: impl Into<String>) -> Self {
        let src_type = src_type.into();
        let dst_type = dst_type.into();
        Relation {
            name: format!("{src_type}->{dst_type}"),
            src_type,
            dst_type,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl Default for Relation {
    fn default() -> Self {
        Relation::new("src", "dst")
    }
}

/// Compressed sparse row adjacency with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
}

impl Csr {
    /// `pairs` must be sorted by (row, col) and free of duplicates.
    fn from_sorted(rows: usize, pairs: impl Iterator<Item = (VertexId, VertexId)>) -> Self {
        let mut offsets = vec![0usize; rows + 1];
        let mut targets = Vec::new();
        for (r, c) in pairs {
            offsets[r as usize + 1] += 1;
            targets.push(c);
        }
        for i in 0..rows {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, targets }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, row: VertexId) -> &[VertexId] {
        let r = row as usize;
        &self.targets[self.offsets[r]..self.offsets[r + 1]]
    }

    pub fn degree(&self, row: VertexId) -> usize {
        let r = row as usize;
        self.offsets[r + 1] - self.offsets[r]
    }
}

/// Directed bipartite graph with forward (source → destinations) and reverse
/// (destination → sources) adjacency. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticGraph {
    num_src: usize,
    num_dst: usize,
    /// Sorted ascending by (src, dst), deduplicated.
    edges: Vec<(VertexId, VertexId)>,
    fwd: Csr,
    rev: Csr,
    relation: Relation,
    feature_bytes_src: usize,
    feature_bytes_dst: usize,
    duplicates_dropped: usize,
}

impl SemanticGraph {
    /// Builds a graph from an edge sequence. Duplicate edges are dropped and
    /// counted; out-of-range ids are rejected.
    pub fn from_edges<I>(num_src: usize, num_dst: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut edges: Vec<_> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u as usize >= num_src {
                return Err(Error::VertexOutOfRange {
                    role: Role::Src,
                    id: u as u64,
                    count: num_src,
                });
            }
            if v as usize >= num_dst {
                return Err(Error::VertexOutOfRange {
                    role: Role::Dst,
                    id: v as u64,
                    count: num_dst,
                });
            }
        }
        let raw = edges.len();
        edges.sort_unstable();
        edges.dedup();
        let duplicates_dropped = raw - edges.len();

        let fwd = Csr::from_sorted(num_src, edges.iter().copied());
        let mut reversed: Vec<_> = edges.iter().map(|&(u, v)| (v, u)).collect();
        reversed.sort_unstable();
        let rev = Csr::from_sorted(num_dst, reversed.into_iter());

        let default_bytes = BYTES_PER_ELEMENT * DEFAULT_FEATURE_DIM;
        Ok(SemanticGraph {
            num_src,
            num_dst,
            edges,
            fwd,
            rev,
            relation: Relation::default(),
            feature_bytes_src: default_bytes,
            feature_bytes_dst: default_bytes,
            duplicates_dropped,
        })
    }

    pub fn with_relation(mut self, relation: Relation) -> Self {
        self.relation = relation;
        self
    }

    pub fn with_feature_bytes(mut self, src: usize, dst: usize) -> Self {
        self.feature_bytes_src = src;
        self.feature_bytes_dst = dst;
        self
    }

    pub fn num_src(&self) -> usize {
        self.num_src
    }

    pub fn num_dst(&self) -> usize {
        self.num_dst
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn feature_bytes_src(&self) -> usize {
        self.feature_bytes_src
    }

    pub fn feature_bytes_dst(&self) -> usize {
        self.feature_bytes_dst
    }

    /// Number of duplicate edges dropped when the graph was built.
    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    /// Destinations of source `u`, ascending.
    pub fn out_neighbors(&self, u: VertexId) -> &[VertexId] {
        self.fwd.neighbors(u)
    }

    /// Sources of destination `v`, ascending.
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        self.rev.neighbors(v)
    }

    pub fn out_degree(&self, u: VertexId) -> usize {
        self.fwd.degree(u)
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.rev.degree(v)
    }

    pub fn forward(&self) -> &Csr {
        &self.fwd
    }

    pub fn reverse(&self) -> &Csr {
        &self.rev
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        (u as usize) < self.num_src && self.fwd.neighbors(u).binary_search(&v).is_ok()
    }

    /// Stable content hash over the dimensions and the sorted edge list.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update((self.num_src as u64).to_le_bytes());
        hasher.update((self.num_dst as u64).to_le_bytes());
        for &(u, v) in &self.edges {
            hasher.update(u.to_le_bytes());
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub num_edges: usize,
    pub duplicate_edges: usize,
    pub isolated_src: usize,
    pub isolated_dst: usize,
    pub min_src_degree: usize,
    pub max_src_degree: usize,
    pub min_dst_degree: usize,
    pub max_dst_degree: usize,
}

/// Structural summary of a graph. Never fails.
pub fn validate(g: &SemanticGraph) -> ValidationReport {
    let src_deg = (0..g.num_src as VertexId).map(|u| g.out_degree(u));
    let dst_deg = (0..g.num_dst as VertexId).map(|v| g.in_degree(v));
    let (isolated_src, min_src_degree, max_src_degree) = degree_stats(src_deg);
    let (isolated_dst, min_dst_degree, max_dst_degree) = degree_stats(dst_deg);
    ValidationReport {
        num_edges: g.num_edges(),
        duplicate_edges: g.duplicates_dropped,
        isolated_src,
        isolated_dst,
        min_src_degree,
        max_src_degree,
        min_dst_degree,
        max_dst_degree,
    }
}

fn degree_stats(degrees: impl Iterator<Item = usize>) -> (usize, usize, usize) {
    let mut isolated = 0;
    let mut min = usize::MAX;
    let mut max = 0;
    for d in degrees {
        if d == 0 {
            isolated += 1;
        }
        min = min.min(d);
        max = max.max(d);
    }
    if min == usize::MAX {
        min = 0;
    }
    (isolated, min, max)
}
