//! Benchmark environments.
