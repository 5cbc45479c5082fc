//! Graph recoupling: backbone selection and the three-way edge split.
//!
//! The backbone is a vertex cover of the semantic graph. Sources in the
//! backbone form `src_in`, the rest `src_out`; likewise `dst_in`/`dst_out`.
//! With a cover, no edge joins `src_out` to `dst_out`, so every edge lands in
//! exactly one of
//!
//! - `g1`: `src_out × dst_in`
//! - `g2`: `src_in × dst_in`
//! - `g3`: `src_in × dst_out`

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{SemanticGraph, VertexId};
use crate::matching::Matching;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackboneMode {
    /// Minimum vertex cover from alternating-path reachability.
    #[default]
    Konig,
    /// Direct transcription of the candidate-neighbor classification loop.
    /// Not guaranteed to be a cover.
    PaperLiteral,
}

impl fmt::Display for BackboneMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackboneMode::Konig => "konig",
            BackboneMode::PaperLiteral => "paper-literal",
        })
    }
}

impl FromStr for BackboneMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "konig" => Ok(BackboneMode::Konig),
            "paper-literal" => Ok(BackboneMode::PaperLiteral),
            other => Err(Error::Config(format!("unknown backbone mode {other:?}"))),
        }
    }
}

/// Four-way vertex classification. Each role is split by a membership flag,
/// so the in/out classes are disjoint and cover their role by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    mode: BackboneMode,
    src_in: Vec<bool>,
    dst_in: Vec<bool>,
}

fn ids_where(flags: &[bool], want: bool) -> Vec<VertexId> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f == want)
        .map(|(i, _)| i as VertexId)
        .collect()
}

impl Partition {
    pub fn mode(&self) -> BackboneMode {
        self.mode
    }

    pub fn is_src_in(&self, u: VertexId) -> bool {
        self.src_in[u as usize]
    }

    pub fn is_dst_in(&self, v: VertexId) -> bool {
        self.dst_in[v as usize]
    }

    pub fn src_in(&self) -> Vec<VertexId> {
        ids_where(&self.src_in, true)
    }

    pub fn src_out(&self) -> Vec<VertexId> {
        ids_where(&self.src_in, false)
    }

    pub fn dst_in(&self) -> Vec<VertexId> {
        ids_where(&self.dst_in, true)
    }

    pub fn dst_out(&self) -> Vec<VertexId> {
        ids_where(&self.dst_in, false)
    }

    pub fn src_in_count(&self) -> usize {
        self.src_in.iter().filter(|&&f| f).count()
    }

    pub fn dst_in_count(&self) -> usize {
        self.dst_in.iter().filter(|&&f| f).count()
    }

    /// `|src_in| + |dst_in|`.
    pub fn backbone_size(&self) -> usize {
        self.src_in_count() + self.dst_in_count()
    }

    pub fn class_sizes(&self) -> ClassSizes {
        let src_in = self.src_in_count();
        let dst_in = self.dst_in_count();
        ClassSizes {
            src_in,
            src_out: self.src_in.len() - src_in,
            dst_in,
            dst_out: self.dst_in.len() - dst_in,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode = {}", self.mode);
        for (name, ids) in [
            ("src_in", self.src_in()),
            ("src_out", self.src_out()),
            ("dst_in", self.dst_in()),
            ("dst_out", self.dst_out()),
        ] {
            let list: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{name} = [{}]", list.join(", "));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassSizes {
    pub src_in: usize,
    pub src_out: usize,
    pub dst_in: usize,
    pub dst_out: usize,
}

fn check_matching(g: &SemanticGraph, m: &Matching) -> Result<()> {
    m.validate(g)
}

/// König construction. Let Z be everything reachable from unmatched sources
/// by alternating paths (unmatched edges source → destination, matched edges
/// destination → source). Then `src_in = sources ∉ Z` and `dst_in =
/// destinations ∈ Z`, a minimum vertex cover with `|backbone| == |m|`.
///
/// Fails if `m` is not a valid matching of `g`, or if the search meets a free
/// destination (an augmenting path, so `m` was not maximum).
pub fn select_backbone_konig(g: &SemanticGraph, m: &Matching) -> Result<Partition> {
    check_matching(g, m)?;
    let mut src_reached = vec![false; g.num_src()];
    let mut dst_reached = vec![false; g.num_dst()];
    let mut frontier = VecDeque::new();
    for u in 0..g.num_src() as VertexId {
        if !m.is_src_matched(u) {
            src_reached[u as usize] = true;
            frontier.push_back(u);
        }
    }
    while let Some(u) = frontier.pop_front() {
        for &v in g.out_neighbors(u) {
            if dst_reached[v as usize] || m.src_partner(u) == Some(v) {
                continue;
            }
            dst_reached[v as usize] = true;
            let Some(w) = m.dst_partner(v) else {
                return Err(Error::Contract(format!(
                    "matching is not maximum: augmenting path ends at destination {v}"
                )));
            };
            if !src_reached[w as usize] {
                src_reached[w as usize] = true;
                frontier.push_back(w);
            }
        }
    }
    Ok(Partition {
        mode: BackboneMode::Konig,
        src_in: src_reached.iter().map(|&r| !r).collect(),
        dst_in: dst_reached,
    })
}

/// Classification loop over matched candidates, transcribed as printed:
/// a matched source with an unmatched destination neighbor joins `src_in`
/// (those neighbors go to `dst_out`); a matched destination with an unmatched
/// source neighbor joins `dst_in` (those neighbors go to `src_out`); every
/// other vertex falls to the `out` class of its role.
pub fn select_backbone_paper(g: &SemanticGraph, m: &Matching) -> Result<Partition> {
    check_matching(g, m)?;
    let mut src_in = vec![false; g.num_src()];
    let mut dst_in = vec![false; g.num_dst()];
    for u in 0..g.num_src() as VertexId {
        if m.is_src_matched(u) && g.out_neighbors(u).iter().any(|&v| !m.is_dst_matched(v)) {
            src_in[u as usize] = true;
        }
    }
    for v in 0..g.num_dst() as VertexId {
        if m.is_dst_matched(v) && g.in_neighbors(v).iter().any(|&u| !m.is_src_matched(u)) {
            dst_in[v as usize] = true;
        }
    }
    Ok(Partition {
        mode: BackboneMode::PaperLiteral,
        src_in,
        dst_in,
    })
}

pub fn select_backbone(g: &SemanticGraph, m: &Matching, mode: BackboneMode) -> Result<Partition> {
    match mode {
        BackboneMode::Konig => select_backbone_konig(g, m),
        BackboneMode::PaperLiteral => select_backbone_paper(g, m),
    }
}

/// Number of edges with both endpoints outside the backbone.
pub fn verify_cover(g: &SemanticGraph, p: &Partition) -> usize {
    g.edges()
        .iter()
        .filter(|&&(u, v)| !p.is_src_in(u) && !p.is_dst_in(v))
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgraphKind {
    /// An unsplit graph (plan root at depth 0).
    Whole,
    /// `src_out × dst_in`; destinations are stationary.
    G1,
    /// `src_in × dst_in`; sources are stationary.
    G2,
    /// `src_in × dst_out`; sources are stationary.
    G3,
}

impl fmt::Display for SubgraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubgraphKind::Whole => "root",
            SubgraphKind::G1 => "g1",
            SubgraphKind::G2 => "g2",
            SubgraphKind::G3 => "g3",
        })
    }
}

/// A subgraph with compact local ids. `src_ids[i]` / `dst_ids[j]` give the
/// ids of local source `i` / destination `j` in the reference namespace
/// (the parent graph, or the plan root after composition).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub kind: SubgraphKind,
    pub graph: SemanticGraph,
    pub src_ids: Vec<VertexId>,
    pub dst_ids: Vec<VertexId>,
}

impl Subgraph {
    /// The whole graph under identity maps.
    pub fn whole(g: &SemanticGraph) -> Self {
        Subgraph {
            kind: SubgraphKind::Whole,
            graph: g.clone(),
            src_ids: (0..g.num_src() as VertexId).collect(),
            dst_ids: (0..g.num_dst() as VertexId).collect(),
        }
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Number of vertices on the backbone (buffer-resident) side.
    pub fn stationary_size(&self) -> usize {
        match self.kind {
            SubgraphKind::Whole => 0,
            SubgraphKind::G1 => self.graph.num_dst(),
            SubgraphKind::G2 | SubgraphKind::G3 => self.graph.num_src(),
        }
    }

    /// Edges mapped back into the reference namespace.
    pub fn mapped_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.graph
            .edges()
            .iter()
            .map(|&(u, v)| (self.src_ids[u as usize], self.dst_ids[v as usize]))
    }

    /// Re-expresses this subgraph's maps relative to `parent`'s reference
    /// namespace (this subgraph's ids must be local ids of `parent`).
    pub fn lift_through(mut self, parent: &Subgraph) -> Self {
        for id in &mut self.src_ids {
            *id = parent.src_ids[*id as usize];
        }
        for id in &mut self.dst_ids {
            *id = parent.dst_ids[*id as usize];
        }
        self
    }

    /// Remap tables as text: `src <local> <parent>` / `dst <local> <parent>`.
    pub fn remap_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# role local parent");
        for (i, id) in self.src_ids.iter().enumerate() {
            let _ = writeln!(out, "src {i} {id}");
        }
        for (j, id) in self.dst_ids.iter().enumerate() {
            let _ = writeln!(out, "dst {j} {id}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphTriple {
    pub mode: BackboneMode,
    pub g1: Subgraph,
    pub g2: Subgraph,
    pub g3: Subgraph,
    /// Edges outside the backbone that were routed to `g2` (paper-literal only).
    pub uncovered_routed: usize,
}

impl SubgraphTriple {
    /// `g1`, `g2`, `g3` in emission order.
    pub fn iter(&self) -> impl Iterator<Item = &Subgraph> {
        [&self.g1, &self.g2, &self.g3].into_iter()
    }

    pub fn total_edges(&self) -> usize {
        self.iter().map(Subgraph::num_edges).sum()
    }

    pub fn max_stationary_size(&self) -> usize {
        self.iter()
            .map(Subgraph::stationary_size)
            .max()
            .unwrap_or(0)
    }
}

/// Splits the edges of `g` by class pair. Local ids are compacted to the
/// vertices incident to each subgraph's edges, ascending by parent id.
///
/// In paper-literal mode, edges with both endpoints outside the backbone go
/// to `g2` and are counted in `uncovered_routed`. In König mode such an edge
/// is an internal error.
pub fn generate_subgraphs(g: &SemanticGraph, p: &Partition) -> Result<SubgraphTriple> {
    if p.src_in.len() != g.num_src() || p.dst_in.len() != g.num_dst() {
        return Err(Error::Contract(
            "partition does not belong to this graph".into(),
        ));
    }
    let mut buckets: [Vec<(VertexId, VertexId)>; 3] = Default::default();
    let mut uncovered = 0;
    for &(u, v) in g.edges() {
        let slot = match (p.is_src_in(u), p.is_dst_in(v)) {
            (false, true) => 0,
            (true, true) => 1,
            (true, false) => 2,
            (false, false) => {
                if p.mode == BackboneMode::Konig {
                    return Err(Error::Contract(format!(
                        "edge ({u}, {v}) is not covered by a konig backbone"
                    )));
                }
                uncovered += 1;
                1
            }
        };
        buckets[slot].push((u, v));
    }
    let [e1, e2, e3] = buckets;
    Ok(SubgraphTriple {
        mode: p.mode,
        g1: compact(g, SubgraphKind::G1, &e1)?,
        g2: compact(g, SubgraphKind::G2, &e2)?,
        g3: compact(g, SubgraphKind::G3, &e3)?,
        uncovered_routed: uncovered,
    })
}

fn compact(
    parent: &SemanticGraph,
    kind: SubgraphKind,
    edges: &[(VertexId, VertexId)],
) -> Result<Subgraph> {
    fn local_ids(
        count: usize,
        used: impl Iterator<Item = VertexId>,
    ) -> (Vec<VertexId>, Vec<VertexId>) {
        let mut local = vec![VertexId::MAX; count];
        let mut present = vec![false; count];
        for id in used {
            present[id as usize] = true;
        }
        let mut ids = Vec::new();
        for (i, _) in present.iter().enumerate().filter(|(_, &p)| p) {
            local[i] = ids.len() as VertexId;
            ids.push(i as VertexId);
        }
        (local, ids)
    }
    let (src_local, src_ids) = local_ids(parent.num_src(), edges.iter().map(|e| e.0));
    let (dst_local, dst_ids) = local_ids(parent.num_dst(), edges.iter().map(|e| e.1));
    let graph = SemanticGraph::from_edges(
        src_ids.len(),
        dst_ids.len(),
        edges
            .iter()
            .map(|&(u, v)| (src_local[u as usize], dst_local[v as usize])),
    )?
    .with_relation(parent.relation().clone())
    .with_feature_bytes(parent.feature_bytes_src(), parent.feature_bytes_dst());
    Ok(Subgraph {
        kind,
        graph,
        src_ids,
        dst_ids,
    })
}
