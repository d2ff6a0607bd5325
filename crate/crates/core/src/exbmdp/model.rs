use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::bits::Bits;
use crate::error::{Error, Result};

const STOCHASTIC_TOL: f64 = 1e-12;

/// Observation constructor `(t, s, e) -> x` together with its exact inverses.
///
/// Implementations must satisfy the block property: for every observation
/// produced by [`Emission::emit`], `decode_latent` returns the latent state and
/// `decode_exogenous` returns the exogenous factor values it was built from.
pub trait Emission: Send + Sync + fmt::Debug {
    fn obs_len(&self) -> usize;

    fn emit(&self, t: usize, latent: usize, exogenous: &[usize], rng: &mut dyn RngCore) -> Bits;

    fn decode_latent(&self, t: usize, obs: &Bits) -> usize;

    fn decode_exogenous(&self, t: usize, obs: &Bits) -> Vec<usize>;
}

/// One finite-state exogenous Markov chain.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorChain {
    /// Distribution of the factor at `t = 0`.
    pub initial: Vec<f64>,
    /// `transitions[t][i][j] = Pr(e_{t+1} = j | e_t = i)`, one matrix per step.
    pub transitions: Vec<Vec<Vec<f64>>>,
}

impl FactorChain {
    /// Chain that reuses a single transition matrix at every step.
    pub fn homogeneous(initial: Vec<f64>, matrix: Vec<Vec<f64>>, horizon: usize) -> Self {
        FactorChain {
            initial,
            transitions: vec![matrix; horizon.saturating_sub(1)],
        }
    }

    pub fn n_values(&self) -> usize {
        self.initial.len()
    }

    fn validate(&self, factor: usize, horizon: usize) -> Result<()> {
        let k = self.initial.len();
        if k == 0 {
            return Err(Error::InvalidSpec(format!("factor {factor} has no values")));
        }
        check_distribution(&self.initial)
            .map_err(|m| Error::InvalidSpec(format!("factor {factor} initial distribution: {m}")))?;
        if self.transitions.len() != horizon - 1 {
            return Err(Error::InvalidSpec(format!(
                "factor {factor} has {} transition matrices, expected {}",
                self.transitions.len(),
                horizon - 1
            )));
        }
        for (t, m) in self.transitions.iter().enumerate() {
            if m.len() != k {
                return Err(Error::InvalidSpec(format!(
                    "factor {factor} step {t}: matrix has {} rows, expected {k}",
                    m.len()
                )));
            }
            for (i, row) in m.iter().enumerate() {
                if row.len() != k {
                    return Err(Error::InvalidSpec(format!(
                        "factor {factor} step {t} row {i}: {} columns, expected {k}",
                        row.len()
                    )));
                }
                check_distribution(row)
                    .map_err(|msg| Error::InvalidSpec(format!("factor {factor} step {t} row {i}: {msg}")))?;
            }
        }
        Ok(())
    }
}

fn check_distribution(p: &[f64]) -> std::result::Result<(), String> {
    if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err("entries must lie in [0, 1]".into());
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(format!("sums to {total}, expected 1"));
    }
    Ok(())
}

pub(crate) fn sample_categorical(p: &[f64], rng: &mut dyn RngCore) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding slack above the last cumulative sum
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

/// Independent exogenous factors, each a Markov chain over `horizon` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct ExogenousChainSpec {
    factors: Vec<FactorChain>,
    horizon: usize,
}

impl ExogenousChainSpec {
    pub fn new(factors: Vec<FactorChain>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidSpec("horizon must be positive".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            f.validate(i, horizon)?;
        }
        Ok(ExogenousChainSpec { factors, horizon })
    }

    pub fn factors(&self) -> &[FactorChain] {
        &self.factors
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    /// Marginal distribution of `factor` at timestep `t` by forward recursion
    /// `p_{t+1} = p_t * T_t`.
    pub fn marginal(&self, factor: usize, t: usize) -> Result<Vec<f64>> {
        let chain = self
            .factors
            .get(factor)
            .ok_or_else(|| Error::InvalidArgument(format!("factor {factor} out of range 0..{}", self.factors.len())))?;
        if t >= self.horizon {
            return Err(Error::InvalidArgument(format!(
                "timestep {t} out of range 0..{}",
                self.horizon
            )));
        }
        let mut p = chain.initial.clone();
        for m in &chain.transitions[..t] {
            let mut next = vec![0.0; p.len()];
            for (i, &pi) in p.iter().enumerate() {
                for (j, &mij) in m[i].iter().enumerate() {
                    next[j] += pi * mij;
                }
            }
            p = next;
        }
        Ok(p)
    }

    /// Samples a full exogenous path, indexed `[t][factor]`.
    pub fn sample_path(&self, rng: &mut dyn RngCore) -> Vec<Vec<usize>> {
        let mut path = Vec::with_capacity(self.horizon);
        let mut cur: Vec<usize> = self
            .factors
            .iter()
            .map(|f| sample_categorical(&f.initial, rng))
            .collect();
        path.push(cur.clone());
        for t in 0..self.horizon - 1 {
            cur = self
                .factors
                .iter()
                .zip(&cur)
                .map(|(f, &e)| sample_categorical(&f.transitions[t][e], rng))
                .collect();
            path.push(cur.clone());
        }
        path
    }
}

/// Full generative description of an Ex-BMDP instance.
#[derive(Clone)]
pub struct ExBmdpSpec {
    horizon: usize,
    n_actions: usize,
    state_counts: Vec<usize>,
    /// `transitions[t][s][a]` is the latent state at `t + 1`.
    transitions: Vec<Vec<Vec<usize>>>,
    exogenous: ExogenousChainSpec,
    emission: Arc<dyn Emission>,
}

impl fmt::Debug for ExBmdpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExBmdpSpec")
            .field("horizon", &self.horizon)
            .field("n_actions", &self.n_actions)
            .field("state_counts", &self.state_counts)
            .field("n_factors", &self.exogenous.n_factors())
            .field("emission", &self.emission)
            .finish()
    }
}

impl ExBmdpSpec {
    pub fn new(
        n_actions: usize,
        state_counts: Vec<usize>,
        transitions: Vec<Vec<Vec<usize>>>,
        exogenous: ExogenousChainSpec,
        emission: Arc<dyn Emission>,
    ) -> Result<Self> {
        let horizon = state_counts.len();
        if horizon == 0 {
            return Err(Error::InvalidSpec("horizon must be positive".into()));
        }
        if n_actions == 0 {
            return Err(Error::InvalidSpec("at least one action is required".into()));
        }
        if state_counts[0] != 1 {
            return Err(Error::InvalidSpec(format!(
                "the first timestep must have exactly one latent state, got {}",
                state_counts[0]
            )));
        }
        if let Some(t) = state_counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSpec(format!("timestep {t} has no latent states")));
        }
        if transitions.len() != horizon - 1 {
            return Err(Error::InvalidSpec(format!(
                "expected {} transition tables, got {}",
                horizon - 1,
                transitions.len()
            )));
        }
        for (t, table) in transitions.iter().enumerate() {
            if table.len() != state_counts[t] {
                return Err(Error::InvalidSpec(format!(
                    "transition table at step {t} covers {} states, expected {}",
                    table.len(),
                    state_counts[t]
                )));
            }
            for (s, row) in table.iter().enumerate() {
                if row.len() != n_actions {
                    return Err(Error::InvalidSpec(format!(
                        "transition ({t}, {s}) has {} actions, expected {n_actions}",
                        row.len()
                    )));
                }
                if let Some(&bad) = row.iter().find(|&&next| next >= state_counts[t + 1]) {
                    return Err(Error::InvalidSpec(format!(
                        "transition ({t}, {s}) leads to state {bad}, but step {} has {} states",
                        t + 1,
                        state_counts[t + 1]
                    )));
                }
            }
        }
        if exogenous.horizon != horizon {
            return Err(Error::InvalidSpec(format!(
                "exogenous horizon {} does not match latent horizon {horizon}",
                exogenous.horizon
            )));
        }
        Ok(ExBmdpSpec {
            horizon,
            n_actions,
            state_counts,
            transitions,
            exogenous,
            emission,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn state_counts(&self) -> &[usize] {
        &self.state_counts
    }

    pub fn obs_len(&self) -> usize {
        self.emission.obs_len()
    }

    /// Latent state at `t + 1` after taking `action` in `state` at `t`.
    pub fn next_state(&self, t: usize, state: usize, action: usize) -> usize {
        self.transitions[t][state][action]
    }

    pub fn exogenous(&self) -> &ExogenousChainSpec {
        &self.exogenous
    }

    pub fn emission(&self) -> &dyn Emission {
        self.emission.as_ref()
    }

    /// Ground-truth latent encoder.
    pub fn decode_latent(&self, t: usize, obs: &Bits) -> usize {
        self.emission.decode_latent(t, obs)
    }

    /// Ground-truth exogenous encoder.
    pub fn decode_exogenous(&self, t: usize, obs: &Bits) -> Vec<usize> {
        self.emission.decode_exogenous(t, obs)
    }
}
