use crate::error::{Error, Result};
use crate::graph::{Role, SemanticGraph, VertexId};
use crate::recouple::{Subgraph, SubgraphKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    /// Source feature vector.
    ReadFeature,
    /// Destination accumulator, read before an update.
    ReadPartial,
    /// Destination accumulator, written after an update. Marks the slot dirty.
    WritePartial,
}

/// One buffer access. `vertex` is a unified index: sources occupy
/// `0..num_src`, destinations `num_src..num_src + num_dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Access {
    pub vertex: u32,
    pub kind: AccessKind,
}

/// A contiguous run of accesses belonging to one subgraph, together with the
/// unified ids of that subgraph's stationary side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub stationary: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessTrace {
    num_src: usize,
    num_dst: usize,
    fingerprint: u64,
    accesses: Vec<Access>,
    segments: Vec<Segment>,
}

impl AccessTrace {
    fn new(g: &SemanticGraph) -> Self {
        AccessTrace {
            num_src: g.num_src(),
            num_dst: g.num_dst(),
            fingerprint: g.fingerprint(),
            accesses: Vec::new(),
            segments: Vec::new(),
        }
    }

    /// A hand-built trace over an explicit unified namespace, as one segment
    /// with nothing stationary. Rejects references outside the namespace.
    pub fn from_accesses(num_src: usize, num_dst: usize, accesses: Vec<Access>) -> Result<Self> {
        let limit = num_src + num_dst;
        if let Some(bad) = accesses.iter().find(|a| a.vertex as usize >= limit) {
            return Err(Error::Contract(format!(
                "access to vertex {} outside namespace of {limit}",
                bad.vertex
            )));
        }
        let end = accesses.len();
        Ok(AccessTrace {
            num_src,
            num_dst,
            fingerprint: 0,
            accesses,
            segments: vec![Segment {
                start: 0,
                end,
                stationary: Vec::new(),
            }],
        })
    }

    pub fn num_src(&self) -> usize {
        self.num_src
    }

    pub fn num_dst(&self) -> usize {
        self.num_dst
    }

    /// Size of the unified vertex namespace.
    pub fn num_vertices(&self) -> usize {
        self.num_src + self.num_dst
    }

    pub fn graph_fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn accesses(&self) -> &[Access] {
        &self.accesses
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.accesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accesses.is_empty()
    }

    pub fn unified(&self, role: Role, id: VertexId) -> u32 {
        match role {
            Role::Src => id,
            Role::Dst => self.num_src as u32 + id,
        }
    }

    /// Inverse of [`AccessTrace::unified`].
    pub fn vertex_ref(&self, unified: u32) -> (Role, VertexId) {
        if (unified as usize) < self.num_src {
            (Role::Src, unified)
        } else {
            (Role::Dst, unified - self.num_src as u32)
        }
    }

    fn push(&mut self, role: Role, id: VertexId, kind: AccessKind) {
        let vertex = self.unified(role, id);
        self.accesses.push(Access { vertex, kind });
    }

    fn begin_segment(&mut self, stationary: Vec<u32>) {
        let start = self.accesses.len();
        self.segments.push(Segment {
            start,
            end: start,
            stationary,
        });
    }

    fn end_segment(&mut self) {
        let end = self.accesses.len();
        if let Some(seg) = self.segments.last_mut() {
            seg.end = end;
        }
    }

    /// Destination-major sweep: `rp(v)`, `rf(u)` for each in-neighbor, `wp(v)`.
    fn sweep_destinations(
        &mut self,
        sub: &SemanticGraph,
        src_ids: &[VertexId],
        dst_ids: &[VertexId],
    ) {
        for v in 0..sub.num_dst() as VertexId {
            let sources = sub.in_neighbors(v);
            if sources.is_empty() {
                continue;
            }
            let dst = dst_ids[v as usize];
            self.push(Role::Dst, dst, AccessKind::ReadPartial);
            for &u in sources {
                self.push(Role::Src, src_ids[u as usize], AccessKind::ReadFeature);
            }
            self.push(Role::Dst, dst, AccessKind::WritePartial);
        }
    }

    /// Source-major sweep: `rf(u)` once, then `rp(v)`/`wp(v)` per out-neighbor.
    fn sweep_sources(&mut self, sub: &SemanticGraph, src_ids: &[VertexId], dst_ids: &[VertexId]) {
        for u in 0..sub.num_src() as VertexId {
            let dests = sub.out_neighbors(u);
            if dests.is_empty() {
                continue;
            }
            self.push(Role::Src, src_ids[u as usize], AccessKind::ReadFeature);
            for &v in dests {
                let dst = dst_ids[v as usize];
                self.push(Role::Dst, dst, AccessKind::ReadPartial);
                self.push(Role::Dst, dst, AccessKind::WritePartial);
            }
        }
    }
}

/// Neighbor-aggregation stream over the original graph: destinations in
/// ascending id order, each pulling its sources in ascending order.
pub fn na_trace_baseline(g: &SemanticGraph) -> AccessTrace {
    let mut trace = AccessTrace::new(g);
    let ids_src: Vec<VertexId> = (0..g.num_src() as VertexId).collect();
    let ids_dst: Vec<VertexId> = (0..g.num_dst() as VertexId).collect();
    trace.begin_segment(Vec::new());
    trace.sweep_destinations(g, &ids_src, &ids_dst);
    trace.end_segment();
    trace
}

/// Neighbor-aggregation stream over restructured subgraphs, concatenated in
/// the given order. Each subgraph streams its non-backbone side exactly once
/// while touching the stationary side:
///
/// - `g1` (`dst_in` stationary): source-major.
/// - `g2`, `g3` (`src_in` stationary): destination-major.
/// - an unsplit graph: the baseline sweep, with nothing stationary.
///
/// Vertex references are in `parent`'s namespace, so reuse across subgraphs
/// is visible to the buffer.
pub fn na_trace_restructured<'a, I>(parent: &SemanticGraph, subgraphs: I) -> AccessTrace
where
    I: IntoIterator<Item = &'a Subgraph>,
{
    let mut trace = AccessTrace::new(parent);
    for sub in subgraphs {
        if sub.is_empty() {
            continue;
        }
        let stationary = match sub.kind {
            SubgraphKind::Whole => Vec::new(),
            SubgraphKind::G1 => sub
                .dst_ids
                .iter()
                .map(|&v| trace.unified(Role::Dst, v))
                .collect(),
            SubgraphKind::G2 | SubgraphKind::G3 => sub
                .src_ids
                .iter()
                .map(|&u| trace.unified(Role::Src, u))
                .collect(),
        };
        trace.begin_segment(stationary);
        match sub.kind {
            SubgraphKind::G1 => trace.sweep_sources(&sub.graph, &sub.src_ids, &sub.dst_ids),
            _ => trace.sweep_destinations(&sub.graph, &sub.src_ids, &sub.dst_ids),
        }
        trace.end_segment();
    }
    trace
}

/// Fetch count when every subgraph starts cold and each of its vertices is
/// loaded exactly once: the sum over subgraphs of their incident vertices.
pub fn oracle_min_fetches<'a, I>(subgraphs: I) -> u64
where
    I: IntoIterator<Item = &'a Subgraph>,
{
    subgraphs
        .into_iter()
        .map(|sub| {
            let g = &sub.graph;
            let srcs = (0..g.num_src() as VertexId)
                .filter(|&u| g.out_degree(u) > 0)
                .count();
            let dsts = (0..g.num_dst() as VertexId)
                .filter(|&v| g.in_degree(v) > 0)
                .count();
            (srcs + dsts) as u64
        })
        .sum()
}
