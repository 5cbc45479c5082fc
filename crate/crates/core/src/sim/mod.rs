//! Trace-driven simulation of the aggregation buffer.
//!
//! Traces reference vertices in a unified namespace (sources then
//! destinations), so source features and destination partials compete for the
//! same slots.

mod buffer;
mod metrics;
mod trace;

pub use buffer::{
    default_capacity, simulate_buffer, BufferConfig, ReplacementPolicy, NA_BUFFER_BYTES,
};
pub use metrics::{
    compare, replacement_histogram, Comparison, HistogramRow, SimMetrics, DEFAULT_BUCKET_EDGES,
};
pub use trace::{
    na_trace_baseline, na_trace_restructured, oracle_min_fetches, Access, AccessKind, AccessTrace,
    Segment,
};
