//! Experiment driver: online dictionary attacks scored against ground
//! truth, latency benchmarks, and offline mapping-file builds.

pub mod attack;
pub mod bench;
pub mod client;
pub mod dict;
pub mod error;
pub mod maps;

pub use attack::{run_attack, write_attack_csv, AttackPlan, AttackRow, UserOutcome};
pub use bench::{run_bench, write_bench_csv, BenchReport};
pub use client::{Profile, Reply, Target};
pub use dict::{generate, DictSpec, Generated};
pub use error::{HarnessError, Result};
pub use maps::build_maps;
