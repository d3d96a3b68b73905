//! Instances: the JSON file format, the random generator and the benchmark
//! harness.

pub mod bench;
pub mod format;
pub mod generate;

pub use bench::{run_bench, run_bench_with, Algorithm, BenchConfig, BenchError, BenchReport, BenchRecord, BenchRow, Bound, GammaSpec};
pub use format::{
    ArcRecord, CapacitySpec, DisutilityKind, DisutilitySpec, Instance, InstanceError, Metadata, ResolvedInstance,
    FORMAT_VERSION,
};
pub use generate::{draw_gamma, generate, generate_resolved, CapacityKind, GenerateError, GeneratorParams};
