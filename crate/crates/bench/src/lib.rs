//! Benchmark crate; see benches/pipeline.rs.
