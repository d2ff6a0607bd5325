use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{AlgoConfig, Technique};
use crate::baselines::{paired_obs_baseline, single_obs_baseline, MiScore};
use crate::craft::{craft_run, draft_run, preprocess, CraftOutput, PreprocessedParams};
use crate::error::{Error, Result};
use crate::eval::{
    assignment_errors, average_accuracy, empirical_accuracy, population_accuracy_toy, CoordinateClass, LabelAccuracy,
};
use crate::exbmdp::{generate_dataset, ActionFreeDataset, Agent, TrajectoryDataset};
use crate::hypotheses::{ClassifierClass, CoordinateEncoders, EncoderClass, LearnedEncoder, SignedCoordinates};
use crate::toy::{StickyPolicy, ToyEnv, ToyEnvSpec, UniformPolicy};

/// Dataset seed of one agent's trajectories, derived from the shared data seed.
pub fn agent_seed(data_seed: u64, agent: Agent) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    let a = rng.next_u64();
    let b = rng.next_u64();
    match agent {
        Agent::A => a,
        Agent::B => b,
    }
}

/// Seed of the held-out labeled evaluation set.
pub fn eval_seed(data_seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    rng.next_u64();
    rng.next_u64();
    rng.next_u64()
}

/// `n` labeled trajectories of `agent` in the toy environment.
pub fn generate_agent(env: &ToyEnv, agent: Agent, n: usize, seed: u64, stay: f64) -> Result<TrajectoryDataset> {
    match agent {
        Agent::A => generate_dataset(&env.spec, &UniformPolicy { n_actions: 2 }, agent, n, seed),
        Agent::B => generate_dataset(&env.spec, &StickyPolicy { stay }, agent, n, seed),
    }
}

/// Encoders returned by one technique, with whatever the technique reports about itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitted {
    pub technique: Technique,
    pub class: CoordinateClass,
    /// One encoder per timestep (two at interior timesteps for the paired baseline).
    pub encoders: Vec<Vec<LearnedEncoder>>,
    pub params: Option<PreprocessedParams>,
    pub craft: Option<CraftOutput>,
    pub scores: Vec<MiScore>,
    pub draft_loss: Option<f64>,
}

impl Fitted {
    fn class_obj(&self, width: usize) -> Box<dyn EncoderClass> {
        match self.class {
            CoordinateClass::Plain => Box::new(CoordinateEncoders { width }),
            CoordinateClass::Signed => Box::new(SignedCoordinates { width }),
        }
    }

    pub fn is_paired(&self) -> bool {
        self.technique == Technique::PairedObs
    }

    /// Population accuracy of every returned encoder on the toy environment.
    pub fn population_accuracy(&self, env: &ToyEnvSpec) -> Result<Vec<Vec<f64>>> {
        self.encoders
            .iter()
            .enumerate()
            .map(|(t, encs)| {
                encs.iter()
                    .map(|e| population_accuracy_toy(e, self.class, env, t))
                    .collect()
            })
            .collect()
    }

    pub fn average_population_accuracy(&self, env: &ToyEnvSpec) -> Result<f64> {
        average_accuracy(&self.population_accuracy(env)?, self.is_paired())
    }

    /// Empirical accuracy of every returned encoder on a labeled evaluation set.
    pub fn empirical_accuracy(&self, data: &TrajectoryDataset) -> Result<Vec<Vec<LabelAccuracy>>> {
        let class = self.class_obj(data.obs_len());
        self.encoders
            .iter()
            .enumerate()
            .map(|(t, encs)| {
                encs.iter()
                    .map(|e| empirical_accuracy(e, class.as_ref(), data, t))
                    .collect()
            })
            .collect()
    }

    /// Misassigned trajectories per timestep against ground-truth labels (CRAFT only).
    pub fn misassigned(&self, a: &TrajectoryDataset, b: &TrajectoryDataset) -> Result<Option<Vec<usize>>> {
        match &self.craft {
            Some(out) => Ok(Some(assignment_errors(&out.assignment, &a.labels()?, &b.labels()?)?)),
            None => Ok(None),
        }
    }
}

/// Runs `technique` with coordinate-projection classes on bit-vector observations.
pub fn fit(
    technique: Technique,
    tau_a: &ActionFreeDataset,
    tau_b: &ActionFreeDataset,
    algo: &AlgoConfig,
) -> Result<Fitted> {
    if tau_a.obs_len() != tau_b.obs_len() || tau_a.horizon() != tau_b.horizon() {
        return Err(Error::Data("the two datasets have different shapes".into()));
    }
    let (horizon, width) = (tau_a.horizon(), tau_a.obs_len());
    let phi = CoordinateEncoders { width };
    let encoders: Vec<&dyn EncoderClass> = vec![&phi; horizon];
    let mut out = Fitted {
        technique,
        class: CoordinateClass::Plain,
        encoders: Vec::new(),
        params: None,
        craft: None,
        scores: Vec::new(),
        draft_loss: None,
    };
    match technique {
        Technique::Craft => {
            let g = SignedCoordinates { width };
            let classifiers: Vec<&dyn ClassifierClass> = vec![&g; horizon];
            let config = algo.craft();
            out.params = Some(preprocess(&config)?);
            let run = craft_run(tau_a, tau_b, &config, &encoders, &classifiers)?;
            out.encoders = run.encoders.iter().map(|e| vec![e.clone()]).collect();
            out.craft = Some(run);
        }
        Technique::Draft => {
            let signed = SignedCoordinates { width };
            let run = draft_run(tau_a, tau_b, &signed)?;
            out.class = CoordinateClass::Signed;
            out.encoders = run.encoders.into_iter().map(|e| vec![e]).collect();
            out.draft_loss = Some(run.loss);
        }
        Technique::SingleObs => {
            let run = single_obs_baseline(tau_a, tau_b, &encoders)?;
            out.encoders = run.encoders.into_iter().map(|e| vec![e]).collect();
            out.scores = run.scores;
        }
        Technique::PairedObs => {
            let run = paired_obs_baseline(tau_a, tau_b, &encoders)?;
            out.encoders = (0..horizon)
                .map(|t| run.encoders_at(t).into_iter().cloned().collect())
                .collect();
            out.scores = run.scores;
        }
    }
    Ok(out)
}
