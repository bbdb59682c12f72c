//! Criterion benchmarks for `lshawkes-core`; see `benches/estimators.rs`.
