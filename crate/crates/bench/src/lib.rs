//! Criterion benchmarks for the verification pipeline; see `benches/`.
