//! Criterion benchmarks for `hsd-core` live under `benches/`.
