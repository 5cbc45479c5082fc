//! Restructuring of directed bipartite semantic graphs for buffer locality.
//!
//! The pipeline has four stages:
//!
//! - [`graph`]: semantic-graph data model (dual CSR), edge-list I/O, synthetic
//!   generators and the per-relation split of a heterogeneous graph.
//! - [`matching`]: maximum-cardinality bipartite matching (decoupling).
//! - [`recouple`]: backbone (minimum vertex cover) selection, the four vertex
//!   classes and the three-way edge split (recoupling).
//! - [`pipeline`]: recursive restructuring, subgraph emission order and a
//!   two-stage frontend/backend cycle model.
//!
//! [`sim`] replays neighbor-aggregation access streams against a finite
//! on-chip buffer to measure fetches, replacements and DRAM traffic.

pub mod error;
pub mod graph;
pub mod matching;
pub mod pipeline;
pub mod recouple;
pub mod sim;

pub use error::{Error, ErrorCategory, Result};
pub use graph::{Relation, Role, SemanticGraph, VertexId};
pub use matching::{max_matching, Matching};
pub use recouple::{BackboneMode, Partition, Subgraph, SubgraphKind, SubgraphTriple};
