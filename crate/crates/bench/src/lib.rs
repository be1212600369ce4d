//! Criterion benchmarks for the counting and asymptotic routines live in `benches/`.
