use std::collections::BTreeMap;

use super::{Relation, SemanticGraph, VertexId, BYTES_PER_ELEMENT, DEFAULT_FEATURE_DIM};
use crate::error::{Error, Result};

/// Heterogeneous graph: typed vertex sets and per-relation edge lists.
#[derive(Debug, Clone, Default)]
pub struct HetGraph {
    vertex_types: BTreeMap<String, usize>,
    relations: Vec<(Relation, Vec<(VertexId, VertexId)>)>,
    feature_dims: BTreeMap<String, usize>,
}

impl HetGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex_type(&mut self, name: impl Into<String>, count: usize) -> &mut Self {
        self.vertex_types.insert(name.into(), count);
        self
    }

    pub fn set_feature_dim(&mut self, vertex_type: impl Into<String>, dim: usize) -> &mut Self {
        self.feature_dims.insert(vertex_type.into(), dim);
        self
    }

    pub fn add_relation(
        &mut self,
        relation: Relation,
        edges: Vec<(VertexId, VertexId)>,
    ) -> &mut Self {
        self.relations.push((relation, edges));
        self
    }

    pub fn vertex_types(&self) -> &BTreeMap<String, usize> {
        &self.vertex_types
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().map(|(r, _)| r)
    }

    pub fn total_edges(&self) -> usize {
        self.relations.iter().map(|(_, e)| e.len()).sum()
    }

    /// `|vertex types| + |edge types| > 2`. Homogeneous inputs are still accepted.
    pub fn is_heterogeneous(&self) -> bool {
        self.vertex_types.len() + self.relations.len() > 2
    }

    fn count_of(&self, ty: &str, relation: &Relation) -> Result<usize> {
        self.vertex_types.get(ty).copied().ok_or_else(|| {
            Error::Schema(format!(
                "relation {} references unknown vertex type {ty:?}",
                relation.name
            ))
        })
    }

    fn feature_bytes(&self, ty: &str) -> usize {
        self.feature_dims
            .get(ty)
            .copied()
            .unwrap_or(DEFAULT_FEATURE_DIM)
            * BYTES_PER_ELEMENT
    }
}

/// Splits a heterogeneous graph into one semantic graph per relation, in
/// declaration order. Same-typed relations get independent source and
/// destination namespaces of equal size.
pub fn build_semantic_graphs(het: &HetGraph) -> Result<Vec<SemanticGraph>> {
    het.relations
        .iter()
        .map(|(relation, edges)| {
            let num_src = het.count_of(&relation.src_type, relation)?;
            let num_dst = het.count_of(&relation.dst_type, relation)?;
            let g = SemanticGraph::from_edges(num_src, num_dst, edges.iter().copied())?;
            Ok(g.with_relation(relation.clone()).with_feature_bytes(
                het.feature_bytes(&relation.src_type),
                het.feature_bytes(&relation.dst_type),
            ))
        })
        .collect()
}
