//! Complexity and latency analysis: operation counts and cycle models.

pub mod latency;
mod ops;

pub use latency::{latency_constrained, latency_unlimited, LatencyError, LatencyReport, NodeTiming};
pub use ops::{op_count_run, DecoderKind, OpCountReport, OpCounts};
