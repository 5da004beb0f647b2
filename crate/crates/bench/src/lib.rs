//! Benchmarks for the filters and the sampler live in `benches/`.
