//! Configuration, single runs with manifests, and the multi-seed toy benchmark.

mod config;
mod manifest;
mod table;
mod trial;

pub use config::{AgentsConfig, AlgoConfig, ExperimentConfig, RunConfig, Technique};
pub use manifest::{run_manifest, RunManifest};
pub use table::{reproduce_table1, BenchmarkCell, BenchmarkTable, TrialRecord};
pub use trial::{agent_seed, eval_seed, fit, generate_agent, Fitted};
