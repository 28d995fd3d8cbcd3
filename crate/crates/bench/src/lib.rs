//! Benchmarks for `resfin-core` live in `benches/`.
