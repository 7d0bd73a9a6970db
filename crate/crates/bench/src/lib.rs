//! Criterion benchmarks for the codes and full sessions; see `benches/`.
