//! Benchmarks live in `benches/`; this crate has no library code of its own.
//!
//! Run with `cargo bench -p baxterq-bench`.

pub use baxterq_core;
