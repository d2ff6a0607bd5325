//! Exogenous block MDPs: the generative model, trajectory simulation and
//! dataset-level diagnostics computed against ground truth.
//!
//! Timesteps are 0-based throughout the crate: `t = 0` is the first
//! observation of an episode and `t = horizon - 1` the last.

mod assumptions;
mod dataset;
mod empirical;
pub mod format;
mod model;
mod policy;
mod simulate;

pub use assumptions::{check_assumptions, AssumptionBounds, AssumptionReport, Violation, ViolationKind};
pub use dataset::{ActionFreeDataset, Agent, Trajectory, TrajectoryDataset};
pub use empirical::{empirical_policy, EmpiricalPolicyTable, TransitionCounts};
pub use model::{Emission, ExBmdpSpec, ExogenousChainSpec, FactorChain};
pub use policy::{HistoryPolicy, MarkovPolicy, Policy};
pub use simulate::{generate_dataset, generate_dataset_with_streams, simulate_trajectory, StreamSeeds, TrajectoryRngs};
