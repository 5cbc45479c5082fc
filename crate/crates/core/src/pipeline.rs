//! Recursive restructuring plans, subgraph emission order and the
//! frontend/backend overlap model.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::SemanticGraph;
use crate::matching::{max_matching_with_events, DecouplerEvents};
use crate::recouple::{
    generate_subgraphs, select_backbone, verify_cover, BackboneMode, ClassSizes, Subgraph,
    SubgraphKind,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestructureConfig {
    /// Deepest level a leaf may sit at; 0 leaves the graph unsplit.
    pub max_depth: usize,
    /// A child is split further only while its stationary side exceeds
    /// `fit_fraction × capacity`.
    pub fit_fraction: f64,
    pub mode: BackboneMode,
}

impl Default for RestructureConfig {
    fn default() -> Self {
        RestructureConfig {
            max_depth: 2,
            fit_fraction: 0.5,
            mode: BackboneMode::Konig,
        }
    }
}

impl RestructureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fit_fraction > 0.0 && self.fit_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "fit fraction must lie in (0, 1], got {}",
                self.fit_fraction
            )));
        }
        Ok(())
    }
}

/// What one decouple + recouple pass over a node produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeStats {
    pub matching_size: usize,
    pub classes: ClassSizes,
    pub uncovered: usize,
    pub events: DecouplerEvents,
}

impl NodeStats {
    pub fn backbone_size(&self) -> usize {
        self.classes.src_in + self.classes.dst_in
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanNode {
    /// Subgraph kinds from the root down to this node; empty for the root.
    pub lineage: Vec<SubgraphKind>,
    /// Vertex maps point into the root graph's namespace.
    pub subgraph: Subgraph,
    /// Present when this node was decoupled and recoupled.
    pub stats: Option<NodeStats>,
    pub children: Vec<PlanNode>,
}

impl PlanNode {
    pub fn depth(&self) -> usize {
        self.lineage.len()
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn path(&self) -> String {
        let mut path = String::from("root");
        for kind in &self.lineage {
            let _ = write!(path, ".{kind}");
        }
        path
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a PlanNode>) {
        if self.children.is_empty() {
            out.push(self);
        }
        for child in &self.children {
            child.collect_leaves(out);
        }
    }

    fn visit<'a>(&'a self, out: &mut Vec<&'a PlanNode>) {
        out.push(self);
        for child in &self.children {
            child.visit(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestructurePlan {
    pub root: PlanNode,
    pub config: RestructureConfig,
    pub capacity: usize,
}

impl RestructurePlan {
    /// Every node in pre-order (`g1`, `g2`, `g3` below each split).
    pub fn nodes(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        self.root.visit(&mut out);
        out
    }

    pub fn leaves(&self) -> Vec<&PlanNode> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    /// Frontend events summed over every split in the plan.
    pub fn total_events(&self) -> DecouplerEvents {
        let mut total = DecouplerEvents::default();
        for node in self.nodes() {
            if let Some(stats) = &node.stats {
                total += stats.events;
            }
        }
        total
    }

    pub fn max_stationary_size(&self) -> usize {
        self.leaves()
            .iter()
            .map(|n| n.subgraph.stationary_size())
            .max()
            .unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "plan mode={} max_depth={} theta={:.6} capacity={}",
            self.config.mode, self.config.max_depth, self.config.fit_fraction, self.capacity
        );
        for node in self.nodes() {
            let indent = "  ".repeat(node.depth());
            let g = &node.subgraph.graph;
            let _ = write!(
                out,
                "{indent}node {} depth={} src={} dst={} edges={} stationary={}",
                node.path(),
                node.depth(),
                g.num_src(),
                g.num_dst(),
                g.num_edges(),
                node.subgraph.stationary_size()
            );
            if let Some(s) = &node.stats {
                let _ = write!(
                    out,
                    " matching={} src_in={} src_out={} dst_in={} dst_out={} uncovered={} pushes={} pops={} lookups={}",
                    s.matching_size,
                    s.classes.src_in,
                    s.classes.src_out,
                    s.classes.dst_in,
                    s.classes.dst_out,
                    s.uncovered,
                    s.events.pushes,
                    s.events.pops,
                    s.events.lookups
                );
            }
            if node.is_leaf() {
                out.push_str(" leaf");
            }
            out.push('\n');
        }
        out
    }
}

/// Decouples and recouples `g`, then keeps splitting any child whose
/// stationary side exceeds `fit_fraction × buffer_capacity`, down to
/// `max_depth`. Empty children are pruned. A split that leaves a single
/// non-empty child is not kept, since it only relabels the same edges.
pub fn restructure_recursive(
    g: &SemanticGraph,
    cfg: &RestructureConfig,
    buffer_capacity: usize,
) -> Result<RestructurePlan> {
    cfg.validate()?;
    let whole = Subgraph::whole(g);
    let root = if cfg.max_depth == 0 {
        PlanNode {
            lineage: Vec::new(),
            subgraph: whole,
            stats: None,
            children: Vec::new(),
        }
    } else {
        let limit = cfg.fit_fraction * buffer_capacity as f64;
        split(whole, Vec::new(), cfg, limit)?
    };
    Ok(RestructurePlan {
        root,
        config: *cfg,
        capacity: buffer_capacity,
    })
}

fn split(
    sub: Subgraph,
    lineage: Vec<SubgraphKind>,
    cfg: &RestructureConfig,
    limit: f64,
) -> Result<PlanNode> {
    let g = &sub.graph;
    let (m, events) = max_matching_with_events(g);
    let partition = select_backbone(g, &m, cfg.mode)?;
    let triple = generate_subgraphs(g, &partition)?;
    let stats = NodeStats {
        matching_size: m.size(),
        classes: partition.class_sizes(),
        uncovered: verify_cover(g, &partition),
        events,
    };

    let mut children = Vec::new();
    for child in triple.iter().filter(|c| !c.is_empty()) {
        let lifted = child.clone().lift_through(&sub);
        let mut child_lineage = lineage.clone();
        child_lineage.push(child.kind);
        let wants_split =
            child_lineage.len() < cfg.max_depth && lifted.stationary_size() as f64 > limit;
        let node = if wants_split {
            let mut attempt = split(lifted, child_lineage, cfg, limit)?;
            if attempt.children.len() == 1 {
                attempt.children.clear();
            }
            attempt
        } else {
            PlanNode {
                lineage: child_lineage,
                subgraph: lifted,
                stats: None,
                children: Vec::new(),
            }
        };
        children.push(node);
    }
    Ok(PlanNode {
        lineage,
        subgraph: sub,
        stats: Some(stats),
        children,
    })
}

/// Leaf subgraphs in emission order: `g1`, `g2`, `g3` within every split,
/// with deeper splits expanded in place.
pub fn emission_order(plan: &RestructurePlan) -> Vec<&Subgraph> {
    plan.leaves().into_iter().map(|n| &n.subgraph).collect()
}

/// Per-event frontend cycle costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleWeights {
    pub push: u64,
    pub pop: u64,
    pub lookup: u64,
}

impl Default for CycleWeights {
    fn default() -> Self {
        CycleWeights {
            push: 1,
            pop: 1,
            lookup: 1,
        }
    }
}

impl CycleWeights {
    pub fn frontend_cycles(&self, ev: &DecouplerEvents) -> u64 {
        ev.pushes * self.push + ev.pops * self.pop + ev.lookups * self.lookup
    }
}

/// Two-stage pipeline over a sequence of graphs: the frontend restructures
/// graph `i + 1` while the backend executes graph `i`.
///
/// `total = f[0] + Σ max(f[i+1], b[i]) + b[n-1]`; zero for no graphs.
pub fn pipeline_model(frontend: &[u64], backend: &[u64]) -> Result<u64> {
    if frontend.len() != backend.len() {
        return Err(Error::Config(format!(
            "{} frontend entries but {} backend entries",
            frontend.len(),
            backend.len()
        )));
    }
    let n = frontend.len();
    if n == 0 {
        return Ok(0);
    }
    let overlapped: u64 = (0..n - 1).map(|i| frontend[i + 1].max(backend[i])).sum();
    Ok(frontend[0] + overlapped + backend[n - 1])
}
