use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{Agent, Trajectory, TrajectoryDataset};
use super::model::ExBmdpSpec;
use super::policy::Policy;
use crate::error::{Error, Result};

/// Seeds of the three independent random streams used per trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSeeds {
    pub policy: u64,
    pub exogenous: u64,
    pub emission: u64,
}

impl StreamSeeds {
    /// Derives the three stream seeds from a single dataset seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        StreamSeeds {
            policy: rng.next_u64(),
            exogenous: rng.next_u64(),
            emission: rng.next_u64(),
        }
    }
}

/// Per-trajectory random streams. Stream `index` of each ChaCha generator is
/// used, so trajectory `i` draws the same numbers regardless of scheduling.
pub struct TrajectoryRngs {
    pub policy: ChaCha8Rng,
    pub exogenous: ChaCha8Rng,
    pub emission: ChaCha8Rng,
}

impl TrajectoryRngs {
    pub fn new(seeds: StreamSeeds, index: u64) -> Self {
        let stream = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            rng
        };
        TrajectoryRngs {
            policy: stream(seeds.policy),
            exogenous: stream(seeds.exogenous),
            emission: stream(seeds.emission),
        }
    }
}

pub fn simulate_trajectory(spec: &ExBmdpSpec, policy: &dyn Policy, rngs: &mut TrajectoryRngs) -> Trajectory {
    let horizon = spec.horizon();
    let mut latent = Vec::with_capacity(horizon);
    latent.push(0usize);
    for t in 0..horizon - 1 {
        let action = policy.act(t, &latent, &mut rngs.policy);
        assert!(
            action < spec.n_actions(),
            "policy chose action {action} but only {} exist",
            spec.n_actions()
        );
        latent.push(spec.next_state(t, latent[t], action));
    }
    let exo = spec.exogenous().sample_path(&mut rngs.exogenous);
    let observations = (0..horizon)
        .map(|t| spec.emission().emit(t, latent[t], &exo[t], &mut rngs.emission))
        .collect();
    Trajectory {
        observations,
        labels: Some(latent),
    }
}

pub fn generate_dataset(
    spec: &ExBmdpSpec,
    policy: &dyn Policy,
    agent: Agent,
    n: usize,
    seed: u64,
) -> Result<TrajectoryDataset> {
    generate_dataset_with_streams(spec, policy, agent, n, StreamSeeds::from_seed(seed))
}

/// Generates `n` labeled trajectories in parallel. The result depends only on
/// the seeds, never on the thread count.
pub fn generate_dataset_with_streams(
    spec: &ExBmdpSpec,
    policy: &dyn Policy,
    agent: Agent,
    n: usize,
    seeds: StreamSeeds,
) -> Result<TrajectoryDataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("dataset size must be at least 1".into()));
    }
    let trajectories: Vec<Trajectory> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rngs = TrajectoryRngs::new(seeds, i as u64);
            simulate_trajectory(spec, policy, &mut rngs)
        })
        .collect();
    TrajectoryDataset::new(agent, spec.horizon(), spec.obs_len(), trajectories)
}
