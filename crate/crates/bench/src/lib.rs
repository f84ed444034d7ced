//! Benchmarks only; run them with `cargo bench -p dcv-bench`.
