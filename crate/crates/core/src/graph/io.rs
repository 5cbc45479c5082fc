use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Relation, Role, SemanticGraph, VertexId, BYTES_PER_ELEMENT, DEFAULT_FEATURE_DIM};
use crate::error::{Error, Result};

/// Sidecar metadata for an edge-list file, stored as `key = value` lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub num_src: usize,
    pub num_dst: usize,
    pub relation: String,
    pub src_type: String,
    pub dst_type: String,
    #[serde(default = "default_feature_dim")]
    pub feature_dim: usize,
}

fn default_feature_dim() -> usize {
    DEFAULT_FEATURE_DIM
}

impl GraphMeta {
    pub fn new(num_src: usize, num_dst: usize, relation: &Relation) -> Self {
        GraphMeta {
            num_src,
            num_dst,
            relation: relation.name.clone(),
            src_type: relation.src_type.clone(),
            dst_type: relation.dst_type.clone(),
            feature_dim: DEFAULT_FEATURE_DIM,
        }
    }

    pub fn of(g: &SemanticGraph) -> Self {
        let mut meta = GraphMeta::new(g.num_src(), g.num_dst(), g.relation());
        meta.feature_dim = g.feature_bytes_src() / BYTES_PER_ELEMENT;
        meta
    }

    pub fn relation_value(&self) -> Relation {
        Relation::new(&self.src_type, &self.dst_type).named(&self.relation)
    }

    pub fn feature_bytes(&self) -> usize {
        self.feature_dim * BYTES_PER_ELEMENT
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Metadata(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }
}

/// Parses a whitespace-separated `src dst` edge list. `#` starts a comment.
///
/// Duplicate edges are dropped; the count is available through
/// [`SemanticGraph::duplicates_dropped`].
pub fn load_edge_list<R: BufRead>(reader: R, meta: &GraphMeta) -> Result<SemanticGraph> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(first) = tokens.next() else {
            continue;
        };
        let second = tokens.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected two vertex ids".into(),
        })?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected token {extra:?}"),
            });
        }
        let u = parse_id(first, line_no)?;
        let v = parse_id(second, line_no)?;
        let u = check_bound(u, Role::Src, meta.num_src, line_no)?;
        let v = check_bound(v, Role::Dst, meta.num_dst, line_no)?;
        edges.push((u, v));
    }
    let bytes = meta.feature_bytes();
    Ok(
        SemanticGraph::from_edges(meta.num_src, meta.num_dst, edges)?
            .with_relation(meta.relation_value())
            .with_feature_bytes(bytes, bytes),
    )
}

fn parse_id(token: &str, line: usize) -> Result<u64> {
    token.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid vertex id {token:?}"),
    })
}

fn check_bound(id: u64, role: Role, count: usize, line: usize) -> Result<VertexId> {
    if id >= count as u64 {
        return Err(Error::Malformed {
            line,
            role,
            id,
            count,
        });
    }
    Ok(id as VertexId)
}

/// Writes the sorted, deduplicated edge list, one `src dst` pair per line.
pub fn write_edge_list<W: Write>(g: &SemanticGraph, mut out: W) -> Result<()> {
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

fn meta_path(edges: &Path) -> PathBuf {
    edges.with_extension("meta")
}

/// Reads `<stem>.edges` together with its `<stem>.meta` sidecar.
pub fn read_graph(edges_path: &Path) -> Result<SemanticGraph> {
    let meta_file = meta_path(edges_path);
    let meta_text = fs::read_to_string(&meta_file)
        .map_err(|e| Error::Metadata(format!("cannot read {}: {e}", meta_file.display())))?;
    let meta = GraphMeta::parse(&meta_text)?;
    let file = fs::File::open(edges_path)?;
    load_edge_list(BufReader::new(file), &meta)
}

/// Writes `<dir>/<stem>.edges` and `<dir>/<stem>.meta`; returns the edge-list path.
pub fn write_graph(g: &SemanticGraph, dir: &Path, stem: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let edges_path = dir.join(format!("{stem}.edges"));
    let mut buf = Vec::with_capacity(g.num_edges() * 12);
    write_edge_list(g, &mut buf)?;
    fs::write(&edges_path, buf)?;
    fs::write(meta_path(&edges_path), GraphMeta::of(g).to_text())?;
    Ok(edges_path)
}
