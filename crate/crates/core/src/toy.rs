//! The controllable-bit toy environment.
//!
//! Observations are `M` bits. Component 0 is the controllable latent bit
//! `s_t`; component `i` in `1..M` is the distractor `s_t XOR e^i_t`, where
//! each `e^i` is a two-state Markov chain. Components are shuffled by a
//! per-timestep permutation. Actions set the next latent bit directly.
//!
//! Factor `e^1` is uniform at `t = 0` and never moves, which makes the pair
//! of `e^1` distractors at consecutive steps exactly as informative about
//! stay/switch behaviour as the controllable bits themselves.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::exbmdp::{Emission, ExBmdpSpec, ExogenousChainSpec, FactorChain, Policy};

/// Parameters of one two-state exogenous chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    /// `Pr(e_0 = 0)`.
    pub init_zero: f64,
    /// `Pr(e_{t+1} = 1 | e_t = 0)`.
    pub flip_up: f64,
    /// `Pr(e_{t+1} = 0 | e_t = 1)`.
    pub flip_down: f64,
}

impl ChainParams {
    pub const FROZEN_UNIFORM: ChainParams = ChainParams {
        init_zero: 0.5,
        flip_up: 0.0,
        flip_down: 0.0,
    };

    /// `Pr(e_t = 0)` by forward recursion.
    pub fn marginal_zero(&self, t: usize) -> f64 {
        let mut p = self.init_zero;
        for _ in 0..t {
            p = p * (1.0 - self.flip_up) + (1.0 - p) * self.flip_down;
        }
        p
    }

    fn chain(&self, horizon: usize) -> FactorChain {
        FactorChain::homogeneous(
            vec![self.init_zero, 1.0 - self.init_zero],
            vec![
                vec![1.0 - self.flip_up, self.flip_up],
                vec![self.flip_down, 1.0 - self.flip_down],
            ],
            horizon,
        )
    }
}

/// Configuration block identifying a toy environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyEnvConfig {
    #[serde(rename = "H")]
    pub horizon: usize,
    #[serde(rename = "M")]
    pub width: usize,
    pub seed: u64,
}

/// Sampled parameters of a toy environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyEnvSpec {
    pub horizon: usize,
    pub width: usize,
    /// `chains[i - 1]` drives factor `e^i`, `i` in `1..M`.
    pub chains: Vec<ChainParams>,
    /// `permutations[t][component]` is the bit position of that component at `t`.
    pub permutations: Vec<Vec<usize>>,
}

impl ToyEnvSpec {
    pub fn sample(horizon: usize, width: usize, seed: u64) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidSpec(format!("toy env needs H >= 2, got {horizon}")));
        }
        if width < 2 {
            return Err(Error::InvalidSpec(format!(
                "toy env needs M >= 2 to hold the e^1 distractor, got {width}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chains = Vec::with_capacity(width - 1);
        chains.push(ChainParams::FROZEN_UNIFORM);
        for _ in 2..width {
            chains.push(ChainParams {
                init_zero: rng.gen(),
                flip_up: rng.gen(),
                flip_down: rng.gen(),
            });
        }
        let permutations = (0..horizon)
            .map(|_| {
                let mut p: Vec<usize> = (0..width).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        Ok(ToyEnvSpec {
            horizon,
            width,
            chains,
            permutations,
        })
    }

    /// Bit position holding `component` at timestep `t`.
    pub fn position(&self, t: usize, component: usize) -> usize {
        self.permutations[t][component]
    }

    /// Component stored at bit `position` at timestep `t` (0 = controllable).
    pub fn component_at(&self, t: usize, position: usize) -> usize {
        self.permutations[t]
            .iter()
            .position(|&p| p == position)
            .expect("permutation is a bijection")
    }

    /// `Pr(e^factor_t = 0)` for `factor` in `1..M`.
    pub fn exogenous_marginal(&self, factor: usize, t: usize) -> Result<f64> {
        if factor == 0 || factor >= self.width {
            return Err(Error::InvalidArgument(format!(
                "factor {factor} out of range 1..{}",
                self.width
            )));
        }
        if t >= self.horizon {
            return Err(Error::InvalidArgument(format!(
                "timestep {t} out of range 0..{}",
                self.horizon
            )));
        }
        Ok(self.chains[factor - 1].marginal_zero(t))
    }
}

#[derive(Debug)]
struct ToyEmission {
    width: usize,
    permutations: Vec<Vec<usize>>,
}

impl Emission for ToyEmission {
    fn obs_len(&self) -> usize {
        self.width
    }

    fn emit(&self, t: usize, latent: usize, exogenous: &[usize], _rng: &mut dyn RngCore) -> Bits {
        let perm = &self.permutations[t];
        let s = latent == 1;
        let mut x = Bits::zeros(self.width);
        x.set(perm[0], s);
        for (i, &e) in exogenous.iter().enumerate() {
            x.set(perm[i + 1], s ^ (e == 1));
        }
        x
    }

    fn decode_latent(&self, t: usize, obs: &Bits) -> usize {
        usize::from(obs.get(self.permutations[t][0]))
    }

    fn decode_exogenous(&self, t: usize, obs: &Bits) -> Vec<usize> {
        let perm = &self.permutations[t];
        let s = obs.get(perm[0]);
        (1..self.width).map(|i| usize::from(obs.get(perm[i]) ^ s)).collect()
    }
}

/// A toy environment: sampled parameters plus the generic model built from them.
#[derive(Clone, Debug)]
pub struct ToyEnv {
    pub params: ToyEnvSpec,
    pub spec: ExBmdpSpec,
}

impl ToyEnv {
    pub fn build(horizon: usize, width: usize, seed: u64) -> Result<Self> {
        let params = ToyEnvSpec::sample(horizon, width, seed)?;
        let exogenous = ExogenousChainSpec::new(params.chains.iter().map(|c| c.chain(horizon)).collect(), horizon)?;
        let mut state_counts = vec![2; horizon];
        state_counts[0] = 1;
        let mut transitions = vec![vec![vec![0, 1]; 2]; horizon - 1];
        transitions[0] = vec![vec![0, 1]];
        let emission = Arc::new(ToyEmission {
            width,
            permutations: params.permutations.clone(),
        });
        let spec = ExBmdpSpec::new(2, state_counts, transitions, exogenous, emission)?;
        Ok(ToyEnv { params, spec })
    }

    pub fn from_config(cfg: &ToyEnvConfig) -> Result<Self> {
        ToyEnv::build(cfg.horizon, cfg.width, cfg.seed)
    }
}

pub fn build_toy_env(horizon: usize, width: usize, seed: u64) -> Result<ExBmdpSpec> {
    Ok(ToyEnv::build(horizon, width, seed)?.spec)
}

/// Picks each of `n_actions` actions with equal probability.
#[derive(Clone, Copy, Debug)]
pub struct UniformPolicy {
    pub n_actions: usize,
}

impl Policy for UniformPolicy {
    fn act(&self, _t: usize, _history: &[usize], rng: &mut dyn RngCore) -> usize {
        rng.gen_range(0..self.n_actions)
    }
}

/// Binary policy that sets the next latent bit equal to the current one with
/// probability `stay`.
#[derive(Clone, Copy, Debug)]
pub struct StickyPolicy {
    pub stay: f64,
}

impl Policy for StickyPolicy {
    fn act(&self, _t: usize, history: &[usize], rng: &mut dyn RngCore) -> usize {
        let s = *history.last().expect("history always contains the current state");
        if rng.gen_bool(self.stay) {
            s
        } else {
            1 - s
        }
    }
}

/// The two data collectors: uniform (agent A) and 3/4-sticky (agent B).
pub fn toy_policies() -> (UniformPolicy, StickyPolicy) {
    (UniformPolicy { n_actions: 2 }, StickyPolicy { stay: 0.75 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exbmdp::{generate_dataset, simulate_trajectory, Agent, StreamSeeds, TrajectoryRngs};

    #[test]
    fn width_two_is_latent_and_one_distractor() {
        let env = ToyEnv::build(4, 2, 11).unwrap();
        assert_eq!(env.params.chains, vec![ChainParams::FROZEN_UNIFORM]);
        let (a, _) = toy_policies();
        let ds = generate_dataset(&env.spec, &a, Agent::A, 50, 1).unwrap();
        for tr in ds.trajectories() {
            let labels = tr.labels.as_ref().unwrap();
            let e0 = env.spec.decode_exogenous(0, &tr.observations[0])[0];
            for (t, x) in tr.observations.iter().enumerate() {
                let s = x.get(env.params.position(t, 0));
                let d = x.get(env.params.position(t, 1));
                assert_eq!(usize::from(s), labels[t]);
                assert_eq!(d, s ^ (e0 == 1));
            }
        }
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(ToyEnv::build(30, 1, 0).is_err());
        assert!(ToyEnv::build(1, 8, 0).is_err());
    }

    #[test]
    fn same_seed_same_environment() {
        let a = ToyEnvSpec::sample(30, 128, 5).unwrap();
        let b = ToyEnvSpec::sample(30, 128, 5).unwrap();
        let c = ToyEnvSpec::sample(30, 128, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for p in &a.permutations {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..128).collect::<Vec<_>>());
        }
        assert!(a.chains.iter().all(|c| [c.init_zero, c.flip_up, c.flip_down]
            .iter()
            .all(|p| (0.0..=1.0).contains(p))));
    }

    #[test]
    fn next_latent_equals_action() {
        let env = ToyEnv::build(30, 128, 3).unwrap();
        let (a, _) = toy_policies();
        let seeds = StreamSeeds::from_seed(42);
        let tr = simulate_trajectory(&env.spec, &a, &mut TrajectoryRngs::new(seeds, 0));
        // replay the policy stream to recover the sampled actions
        let mut rngs = TrajectoryRngs::new(seeds, 0);
        let labels = tr.labels.unwrap();
        assert_eq!(labels.len(), 30);
        assert_eq!(labels[0], 0);
        for t in 0..29 {
            let action = a.act(t, &labels[..=t], &mut rngs.policy);
            assert_eq!(labels[t + 1], action);
        }
    }

    #[test]
    fn marginal_of_frozen_and_absorbing_chains() {
        let env = ToyEnvSpec::sample(10, 8, 1).unwrap();
        for t in 0..10 {
            assert_eq!(env.exogenous_marginal(1, t).unwrap(), 0.5);
        }
        let stuck = ChainParams {
            init_zero: 1.0,
            flip_up: 0.0,
            flip_down: 0.0,
        };
        assert!((0..10).all(|t| stuck.marginal_zero(t) == 1.0));
        assert!(env.exogenous_marginal(0, 0).is_err());
        assert!(env.exogenous_marginal(8, 0).is_err());
        assert!(env.exogenous_marginal(1, 10).is_err());
    }

    #[test]
    fn chain_marginal_matches_hand_recursion_and_generic_model() {
        let c = ChainParams {
            init_zero: 0.7,
            flip_up: 0.2,
            flip_down: 0.4,
        };
        assert!((c.marginal_zero(1) - 0.68).abs() < 1e-12);
        assert!((c.marginal_zero(2) - 0.672).abs() < 1e-12);
        let generic = ExogenousChainSpec::new(vec![c.chain(3)], 3).unwrap();
        assert!((generic.marginal(0, 2).unwrap()[0] - 0.672).abs() < 1e-12);
    }
}
