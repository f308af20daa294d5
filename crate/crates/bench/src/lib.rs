//! Criterion benchmarks for the normal-form engine; see `benches/`.
