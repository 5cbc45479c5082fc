use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Lower bucket edges for replacement counts; the last bucket is open-ended.
pub const DEFAULT_BUCKET_EDGES: &[u64] = &[0, 1, 2, 4, 8, 16];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRow {
    pub lower: u64,
    /// Exclusive upper edge; `None` for the open-ended last bucket.
    pub upper: Option<u64>,
    pub vertices: usize,
    pub accesses: u64,
    pub vertex_ratio: f64,
    pub access_ratio: f64,
}

impl HistogramRow {
    pub fn label(&self) -> String {
        match self.upper {
            Some(hi) => format!("[{},{})", self.lower, hi),
            None => format!("[{},inf)", self.lower),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub num_src: usize,
    pub num_dst: usize,
    pub graph_fingerprint: u64,
    pub vector_bytes: usize,
    pub accesses: u64,
    /// DRAM fetches per unified vertex id.
    pub fetches: Vec<u64>,
    pub writebacks: u64,
    pub histogram: Vec<HistogramRow>,
}

impl SimMetrics {
    pub fn fetches_total(&self) -> u64 {
        self.fetches.iter().sum()
    }

    /// Fetches beyond the first, per vertex.
    pub fn replacements_per_vertex(&self) -> Vec<u64> {
        self.fetches.iter().map(|&f| f.saturating_sub(1)).collect()
    }

    pub fn replacements_total(&self) -> u64 {
        self.fetches.iter().map(|&f| f.saturating_sub(1)).sum()
    }

    pub fn distinct_touched(&self) -> usize {
        self.fetches.iter().filter(|&&f| f > 0).count()
    }

    pub fn total_dram_bytes(&self) -> u64 {
        (self.fetches_total() + self.writebacks) * self.vector_bytes as u64
    }

    /// Fraction of touched vertices in buckets whose lower edge is at least `threshold`.
    pub fn tail_vertex_ratio(&self, threshold: u64) -> f64 {
        self.histogram
            .iter()
            .filter(|r| r.lower >= threshold)
            .map(|r| r.vertex_ratio)
            .sum()
    }

    /// Fraction of fetches in buckets whose lower edge is at least `threshold`.
    pub fn tail_access_ratio(&self, threshold: u64) -> f64 {
        self.histogram
            .iter()
            .filter(|r| r.lower >= threshold)
            .map(|r| r.access_ratio)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fetches_total = {}", self.fetches_total());
        let _ = writeln!(out, "replacements_total = {}", self.replacements_total());
        let _ = writeln!(out, "dram_bytes = {}", self.total_dram_bytes());
        let _ = writeln!(out, "writebacks_total = {}", self.writebacks);
        let _ = writeln!(out, "distinct_vertices = {}", self.distinct_touched());
        let _ = writeln!(out, "accesses = {}", self.accesses);
        let _ = writeln!(out, "vector_bytes = {}", self.vector_bytes);
        let _ = writeln!(out, "# bucket vertex_ratio access_ratio");
        for row in &self.histogram {
            let _ = writeln!(
                out,
                "histogram {} {:.6} {:.6}",
                row.label(),
                row.vertex_ratio,
                row.access_ratio
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        for (k, v) in [
            ("fetches_total", self.fetches_total()),
            ("replacements_total", self.replacements_total()),
            ("dram_bytes", self.total_dram_bytes()),
            ("writebacks_total", self.writebacks),
            ("distinct_vertices", self.distinct_touched() as u64),
            ("accesses", self.accesses),
            ("vector_bytes", self.vector_bytes as u64),
        ] {
            let _ = writeln!(out, "{k},{v}");
        }
        out.push_str("\nbucket,vertices,vertex_ratio,accesses,access_ratio\n");
        for row in &self.histogram {
            let _ = writeln!(
                out,
                "\"{}\",{},{:.6},{},{:.6}",
                row.label(),
                row.vertices,
                row.vertex_ratio,
                row.accesses,
                row.access_ratio
            );
        }
        out
    }
}

/// Buckets touched vertices by replacement count. `lower_edges` must be
/// strictly ascending; counts below the first edge land in the first bucket
/// and counts past the last edge in the open-ended last bucket.
///
/// Vertex ratios are over touched vertices, access ratios over all fetches.
/// Metrics with no fetches give an empty histogram.
pub fn replacement_histogram(m: &SimMetrics, lower_edges: &[u64]) -> Result<Vec<HistogramRow>> {
    if lower_edges.is_empty() || lower_edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "bucket edges must be non-empty and strictly ascending: {lower_edges:?}"
        )));
    }
    let touched = m.distinct_touched();
    let total_fetches = m.fetches_total();
    if touched == 0 {
        return Ok(Vec::new());
    }
    let mut rows: Vec<HistogramRow> = lower_edges
        .iter()
        .enumerate()
        .map(|(i, &lower)| HistogramRow {
            lower,
            upper: lower_edges.get(i + 1).copied(),
            vertices: 0,
            accesses: 0,
            vertex_ratio: 0.0,
            access_ratio: 0.0,
        })
        .collect();
    for &f in m.fetches.iter().filter(|&&f| f > 0) {
        let replacements = f - 1;
        let idx = lower_edges
            .partition_point(|&edge| edge <= replacements)
            .saturating_sub(1);
        rows[idx].vertices += 1;
        rows[idx].accesses += f;
    }
    for row in &mut rows {
        row.vertex_ratio = row.vertices as f64 / touched as f64;
        row.access_ratio = row.accesses as f64 / total_fetches as f64;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Restructured DRAM bytes over baseline DRAM bytes.
    pub dram_ratio: f64,
    pub fetch_ratio: f64,
    pub baseline_fetches: u64,
    pub restructured_fetches: u64,
    pub baseline_replacements: u64,
    pub restructured_replacements: u64,
    pub baseline_dram_bytes: u64,
    pub restructured_dram_bytes: u64,
    pub baseline_histogram: Vec<HistogramRow>,
    pub restructured_histogram: Vec<HistogramRow>,
}

impl Comparison {
    /// Baseline replacements minus restructured replacements.
    pub fn replacement_delta(&self) -> i64 {
        self.baseline_replacements as i64 - self.restructured_replacements as i64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dram_ratio = {:.6}", self.dram_ratio);
        let _ = writeln!(out, "fetch_ratio = {:.6}", self.fetch_ratio);
        let _ = writeln!(out, "baseline_fetches = {}", self.baseline_fetches);
        let _ = writeln!(out, "restructured_fetches = {}", self.restructured_fetches);
        let _ = writeln!(
            out,
            "baseline_replacements = {}",
            self.baseline_replacements
        );
        let _ = writeln!(
            out,
            "restructured_replacements = {}",
            self.restructured_replacements
        );
        let _ = writeln!(out, "replacement_delta = {}", self.replacement_delta());
        let _ = writeln!(out, "baseline_dram_bytes = {}", self.baseline_dram_bytes);
        let _ = writeln!(
            out,
            "restructured_dram_bytes = {}",
            self.restructured_dram_bytes
        );
        let _ = writeln!(
            out,
            "# bucket baseline_vertex baseline_access restructured_vertex restructured_access"
        );
        for (label, b, r) in paired_rows(&self.baseline_histogram, &self.restructured_histogram) {
            let _ = writeln!(
                out,
                "histogram {label} {:.6} {:.6} {:.6} {:.6}",
                b.0, b.1, r.0, r.1
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("field,value\n");
        let _ = writeln!(out, "dram_ratio,{:.6}", self.dram_ratio);
        let _ = writeln!(out, "fetch_ratio,{:.6}", self.fetch_ratio);
        for (k, v) in [
            ("baseline_fetches", self.baseline_fetches as i64),
            ("restructured_fetches", self.restructured_fetches as i64),
            ("baseline_replacements", self.baseline_replacements as i64),
            (
                "restructured_replacements",
                self.restructured_replacements as i64,
            ),
            ("replacement_delta", self.replacement_delta()),
            ("baseline_dram_bytes", self.baseline_dram_bytes as i64),
            (
                "restructured_dram_bytes",
                self.restructured_dram_bytes as i64,
            ),
        ] {
            let _ = writeln!(out, "{k},{v}");
        }
        out.push_str(
            "\nbucket,baseline_vertex_ratio,baseline_access_ratio,restructured_vertex_ratio,restructured_access_ratio\n",
        );
        for (label, b, r) in paired_rows(&self.baseline_histogram, &self.restructured_histogram) {
            let _ = writeln!(
                out,
                "\"{label}\",{:.6},{:.6},{:.6},{:.6}",
                b.0, b.1, r.0, r.1
            );
        }
        out
    }
}

type RatioPair = (f64, f64);

fn paired_rows(a: &[HistogramRow], b: &[HistogramRow]) -> Vec<(String, RatioPair, RatioPair)> {
    let template = if a.len() >= b.len() { a } else { b };
    template
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let pick = |rows: &[HistogramRow]| {
                rows.get(i)
                    .map(|r| (r.vertex_ratio, r.access_ratio))
                    .unwrap_or((0.0, 0.0))
            };
            (row.label(), pick(a), pick(b))
        })
        .collect()
}

fn ratio(num: u64, den: u64) -> f64 {
    match (num, den) {
        (0, 0) => 1.0,
        (_, 0) => f64::INFINITY,
        _ => num as f64 / den as f64,
    }
}

/// Normalizes restructured traffic against the baseline. Both metrics must
/// come from the same graph and vector size.
pub fn compare(baseline: &SimMetrics, restructured: &SimMetrics) -> Result<Comparison> {
    if baseline.graph_fingerprint != restructured.graph_fingerprint
        || baseline.fetches.len() != restructured.fetches.len()
    {
        return Err(Error::Contract(
            "metrics were produced from different graphs".into(),
        ));
    }
    if baseline.vector_bytes != restructured.vector_bytes {
        return Err(Error::Contract(format!(
            "vector sizes differ: {} vs {}",
            baseline.vector_bytes, restructured.vector_bytes
        )));
    }
    Ok(Comparison {
        dram_ratio: ratio(restructured.total_dram_bytes(), baseline.total_dram_bytes()),
        fetch_ratio: ratio(restructured.fetches_total(), baseline.fetches_total()),
        baseline_fetches: baseline.fetches_total(),
        restructured_fetches: restructured.fetches_total(),
        baseline_replacements: baseline.replacements_total(),
        restructured_replacements: restructured.replacements_total(),
        baseline_dram_bytes: baseline.total_dram_bytes(),
        restructured_dram_bytes: restructured.total_dram_bytes(),
        baseline_histogram: baseline.histogram.clone(),
        restructured_histogram: restructured.histogram.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metrics(fetches: Vec<u64>) -> SimMetrics {
        SimMetrics {
            num_src: fetches.len(),
            num_dst: 0,
            graph_fingerprint: 1,
            vector_bytes: 4,
            accesses: 0,
            fetches,
            writebacks: 0,
            histogram: Vec::new(),
        }
    }

    #[test]
    fn all_cold_lands_in_first_bucket() {
        let h = replacement_histogram(&metrics(vec![1, 1, 0, 1]), DEFAULT_BUCKET_EDGES).unwrap();
        assert_eq!(h.len(), DEFAULT_BUCKET_EDGES.len());
        assert_eq!(h[0].vertex_ratio, 1.0);
        assert_eq!(h[0].access_ratio, 1.0);
        assert!(h[1..].iter().all(|r| r.vertices == 0));
    }

    #[test]
    fn mixed_replacements() {
        // replacements a=1, b=1, c=0
        let h = replacement_histogram(&metrics(vec![2, 2, 1]), DEFAULT_BUCKET_EDGES).unwrap();
        assert!((h[0].vertex_ratio - 1.0 / 3.0).abs() < 1e-12);
        assert!((h[0].access_ratio - 1.0 / 5.0).abs() < 1e-12);
        assert!((h[1].vertex_ratio - 2.0 / 3.0).abs() < 1e-12);
        assert!((h[1].access_ratio - 4.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn values_past_last_edge_clamp_to_open_bucket() {
        let h = replacement_histogram(&metrics(vec![40, 9]), &[0, 1]).unwrap();
        assert_eq!(h[1].upper, None);
        assert_eq!(h[1].vertices, 2);
        assert_eq!(h[1].label(), "[1,inf)");
    }

    #[test]
    fn empty_metrics_give_empty_histogram() {
        assert!(
            replacement_histogram(&metrics(vec![0, 0]), DEFAULT_BUCKET_EDGES)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn unsorted_edges_rejected() {
        assert!(replacement_histogram(&metrics(vec![1]), &[0, 4, 2]).is_err());
    }

    #[test]
    fn compare_identical_is_one() {
        let m = metrics(vec![3, 1, 2]);
        let c = compare(&m, &m).unwrap();
        assert_eq!(c.dram_ratio, 1.0);
        assert_eq!(c.replacement_delta(), 0);
    }

    #[test]
    fn compare_ratio_arithmetic() {
        let base = metrics(vec![1000]);
        let restr = metrics(vec![400]);
        let c = compare(&base, &restr).unwrap();
        assert!((c.dram_ratio - 0.40).abs() < 1e-12);
        assert_eq!(c.replacement_delta(), 999 - 399);
    }

    #[test]
    fn compare_rejects_other_graphs() {
        let a = metrics(vec![1]);
        let mut b = metrics(vec![1]);
        b.graph_fingerprint = 2;
        assert!(matches!(compare(&a, &b), Err(Error::Contract(_))));
    }
}
