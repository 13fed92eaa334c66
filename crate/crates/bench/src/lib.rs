//! Criterion benchmarks for counting, embedding and the forest; see `benches/`.
