//! Criterion benchmarks for `ohhc-core`; see `benches/`.
