use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::metrics::{replacement_histogram, SimMetrics, DEFAULT_BUCKET_EDGES};
use super::trace::{AccessKind, AccessTrace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReplacementPolicy {
    #[default]
    Lru,
    Fifo,
}

impl fmt::Display for ReplacementPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReplacementPolicy::Lru => "lru",
            ReplacementPolicy::Fifo => "fifo",
        })
    }
}

impl FromStr for ReplacementPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lru" => Ok(ReplacementPolicy::Lru),
            "fifo" => Ok(ReplacementPolicy::Fifo),
            other => Err(Error::Config(format!(
                "unknown replacement policy {other:?}"
            ))),
        }
    }
}

/// On-chip aggregation buffer size used when no capacity is given.
pub const NA_BUFFER_BYTES: usize = 14_520_000;

/// Vector slots that fit in [`NA_BUFFER_BYTES`], never fewer than 2.
pub fn default_capacity(vector_bytes: usize) -> usize {
    (NA_BUFFER_BYTES / vector_bytes.max(1)).max(2)
}

/// Fully associative buffer of feature-vector slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BufferConfig {
    pub capacity_vectors: usize,
    pub policy: ReplacementPolicy,
    /// Exempt the current segment's stationary vertices from eviction, up to
    /// `capacity - 1` of them. Vertices beyond that budget fall back to the
    /// replacement policy.
    pub pin_backbone: bool,
    /// Write back and drop all contents at every segment boundary, so each
    /// subgraph starts cold.
    pub isolate_subgraphs: bool,
}

impl BufferConfig {
    pub fn new(capacity_vectors: usize) -> Self {
        BufferConfig {
            capacity_vectors,
            policy: ReplacementPolicy::Lru,
            pin_backbone: false,
            isolate_subgraphs: false,
        }
    }

    pub fn with_policy(mut self, policy: ReplacementPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn pinned(mut self, pin: bool) -> Self {
        self.pin_backbone = pin;
        self
    }

    pub fn isolated(mut self, isolate: bool) -> Self {
        self.isolate_subgraphs = isolate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity_vectors < 2 {
            return Err(Error::Config(format!(
                "buffer capacity must be at least 2 vectors, got {}",
                self.capacity_vectors
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Slot {
    resident: bool,
    dirty: bool,
    pinned: bool,
    stamp: u64,
}

struct Buffer {
    cfg: BufferConfig,
    slots: Vec<Slot>,
    /// Resident, unpinned vertices keyed by (stamp, vertex); the first entry
    /// is the victim.
    evictable: BTreeSet<(u64, u32)>,
    occupied: usize,
    pinned: Vec<u32>,
    stationary_mark: Vec<u32>,
    segment: u32,
    clock: u64,
    fetches: Vec<u64>,
    writebacks: u64,
}

impl Buffer {
    fn new(cfg: BufferConfig, vertices: usize) -> Self {
        Buffer {
            cfg,
            slots: vec![Slot::default(); vertices],
            evictable: BTreeSet::new(),
            occupied: 0,
            pinned: Vec::new(),
            stationary_mark: vec![0; vertices],
            segment: 0,
            clock: 0,
            fetches: vec![0; vertices],
            writebacks: 0,
        }
    }

    fn begin_segment(&mut self, stationary: &[u32]) {
        if self.cfg.isolate_subgraphs {
            self.flush();
        } else {
            for v in std::mem::take(&mut self.pinned) {
                let slot = &mut self.slots[v as usize];
                slot.pinned = false;
                self.evictable.insert((slot.stamp, v));
            }
        }
        self.pinned.clear();
        self.segment += 1;
        for &v in stationary {
            self.stationary_mark[v as usize] = self.segment;
        }
    }

    fn flush(&mut self) {
        for slot in &mut self.slots {
            if slot.resident && slot.dirty {
                self.writebacks += 1;
            }
            *slot = Slot::default();
        }
        self.evictable.clear();
        self.pinned.clear();
        self.occupied = 0;
    }

    fn evict_one(&mut self) {
        let (_, victim) = self
            .evictable
            .pop_first()
            .expect("pin budget leaves at least one evictable slot");
        let slot = &mut self.slots[victim as usize];
        if slot.dirty {
            self.writebacks += 1;
        }
        *slot = Slot::default();
        self.occupied -= 1;
    }

    fn access(&mut self, v: u32, kind: AccessKind) {
        self.clock += 1;
        let now = self.clock;
        let idx = v as usize;
        if self.slots[idx].resident {
            let slot = &mut self.slots[idx];
            if self.cfg.policy == ReplacementPolicy::Lru {
                if !slot.pinned {
                    self.evictable.remove(&(slot.stamp, v));
                    self.evictable.insert((now, v));
                }
                slot.stamp = now;
            }
        } else {
            self.fetches[idx] += 1;
            if self.occupied == self.cfg.capacity_vectors {
                self.evict_one();
            }
            self.slots[idx] = Slot {
                resident: true,
                dirty: false,
                pinned: false,
                stamp: now,
            };
            self.evictable.insert((now, v));
            self.occupied += 1;
        }

        if self.cfg.pin_backbone
            && self.stationary_mark[idx] == self.segment
            && !self.slots[idx].pinned
            && self.pinned.len() < self.cfg.capacity_vectors - 1
        {
            let slot = &mut self.slots[idx];
            self.evictable.remove(&(slot.stamp, v));
            slot.pinned = true;
            self.pinned.push(v);
        }
        if kind == AccessKind::WritePartial {
            self.slots[idx].dirty = true;
        }
    }
}

/// Replays `trace` against a buffer of `cfg.capacity_vectors` slots.
///
/// A miss costs one fetch of `vector_bytes`; evicting a dirty partial costs one
/// write-back. Dirty partials still resident at the end are drained and
/// counted as write-backs too.
pub fn simulate_buffer(
    trace: &AccessTrace,
    cfg: &BufferConfig,
    vector_bytes: usize,
) -> Result<SimMetrics> {
    cfg.validate()?;
    let mut buf = Buffer::new(*cfg, trace.num_vertices());
    let accesses = trace.accesses();
    let mut pos = 0;
    for seg in trace.segments() {
        // Accesses outside any segment run under the previous segment's state.
        for a in &accesses[pos..seg.start] {
            buf.access(a.vertex, a.kind);
        }
        buf.begin_segment(&seg.stationary);
        for a in &accesses[seg.start..seg.end] {
            buf.access(a.vertex, a.kind);
        }
        pos = seg.end;
    }
    for a in &accesses[pos..] {
        buf.access(a.vertex, a.kind);
    }
    buf.flush();

    let mut metrics = SimMetrics {
        num_src: trace.num_src(),
        num_dst: trace.num_dst(),
        graph_fingerprint: trace.graph_fingerprint(),
        vector_bytes,
        accesses: accesses.len() as u64,
        fetches: buf.fetches,
        writebacks: buf.writebacks,
        histogram: Vec::new(),
    };
    metrics.histogram = replacement_histogram(&metrics, DEFAULT_BUCKET_EDGES)?;
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SemanticGraph;
    use crate::sim::trace::{na_trace_baseline, Access};

    /// Minimal trace builder over sources only, for hand-simulated sequences.
    fn reads(num_src: usize, seq: &[u32]) -> AccessTrace {
        let accesses = seq
            .iter()
            .map(|&vertex| Access {
                vertex,
                kind: AccessKind::ReadFeature,
            })
            .collect();
        AccessTrace::from_accesses(num_src, 0, accesses).unwrap()
    }

    #[test]
    fn capacity_below_two_is_rejected() {
        let t = reads(1, &[0]);
        let err = simulate_buffer(&t, &BufferConfig::new(1), 4).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn alternating_pair_fits() {
        let t = reads(2, &[0, 1, 0, 1]);
        let m = simulate_buffer(&t, &BufferConfig::new(2), 4).unwrap();
        assert_eq!(m.fetches_total(), 2);
        assert_eq!(m.replacements_total(), 0);
    }

    #[test]
    fn cyclic_three_thrashes_lru() {
        let t = reads(3, &[0, 1, 2, 0, 1, 2]);
        let m = simulate_buffer(&t, &BufferConfig::new(2), 4).unwrap();
        assert_eq!(m.fetches_total(), 6);
        assert_eq!(m.replacements_per_vertex(), vec![1, 1, 1]);
    }

    #[test]
    fn lru_and_fifo_differ_on_reuse() {
        // a b a c a: LRU keeps a hot, FIFO evicts it when c arrives.
        let t = reads(3, &[0, 1, 0, 2, 0]);
        let lru = simulate_buffer(&t, &BufferConfig::new(2), 4).unwrap();
        let fifo = simulate_buffer(
            &t,
            &BufferConfig::new(2).with_policy(ReplacementPolicy::Fifo),
            4,
        )
        .unwrap();
        assert_eq!(lru.fetches_total(), 3);
        assert_eq!(fifo.fetches_total(), 4);
    }

    #[test]
    fn dirty_partials_are_written_back() {
        // One destination, three sources, capacity 2: the partial is evicted
        // mid-aggregation and refetched for the write.
        let g = SemanticGraph::from_edges(3, 1, [(0, 0), (1, 0), (2, 0)]).unwrap();
        let t = na_trace_baseline(&g);
        let m = simulate_buffer(&t, &BufferConfig::new(2), 8).unwrap();
        // rp d, f0, f1 (evicts d, clean), f2 (evicts f0), wp d (evicts f1).
        assert_eq!(m.fetches_total(), 5);
        assert_eq!(m.writebacks, 1);
        assert_eq!(m.total_dram_bytes(), 6 * 8);
    }

    #[test]
    fn large_capacity_has_no_replacements() {
        let g = SemanticGraph::from_edges(3, 3, [(0, 0), (1, 0), (2, 1), (0, 2), (1, 2)]).unwrap();
        let t = na_trace_baseline(&g);
        let m = simulate_buffer(&t, &BufferConfig::new(6), 4).unwrap();
        assert_eq!(m.replacements_total(), 0);
        assert_eq!(m.fetches_total(), 6);
    }

    #[test]
    fn default_capacity_scales_with_vector_size() {
        assert_eq!(default_capacity(256), 56_718);
        assert_eq!(default_capacity(NA_BUFFER_BYTES), 2);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!(
            "fifo".parse::<ReplacementPolicy>().unwrap(),
            ReplacementPolicy::Fifo
        );
        assert!("random".parse::<ReplacementPolicy>().is_err());
    }
}
