//! Criterion benchmarks for `mixident`; see `benches/`.
