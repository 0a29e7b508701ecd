//! Criterion benchmarks for `deblur-core`; see `benches/`.
