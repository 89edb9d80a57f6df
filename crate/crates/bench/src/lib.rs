//! Benchmarks for the resolution, cohomology and monad builders.
