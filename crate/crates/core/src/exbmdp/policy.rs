use rand::RngCore;

use super::model::sample_categorical;

/// A data-collection policy.
///
/// The sampler sees the timestep, the controllable latent-state history
/// `s_0..=s_t` and its own random stream. It never sees observations, so any
/// dataset collected through this trait is independent of observation noise
/// given the latent path.
pub trait Policy: Send + Sync {
    fn act(&self, t: usize, history: &[usize], rng: &mut dyn RngCore) -> usize;
}

/// Markovian policy: `probs[t][s]` is a distribution over actions.
#[derive(Clone, Debug)]
pub struct MarkovPolicy {
    probs: Vec<Vec<Vec<f64>>>,
}

impl MarkovPolicy {
    pub fn new(probs: Vec<Vec<Vec<f64>>>) -> Self {
        MarkovPolicy { probs }
    }
}

impl Policy for MarkovPolicy {
    fn act(&self, t: usize, history: &[usize], rng: &mut dyn RngCore) -> usize {
        let s = *history.last().expect("history always contains the current state");
        sample_categorical(&self.probs[t][s], rng)
    }
}

/// Adapter for history-dependent policies written as closures.
pub struct HistoryPolicy<F>(pub F);

impl<F> Policy for HistoryPolicy<F>
where
    F: Fn(usize, &[usize], &mut dyn RngCore) -> usize + Send + Sync,
{
    fn act(&self, t: usize, history: &[usize], rng: &mut dyn RngCore) -> usize {
        (self.0)(t, history, rng)
    }
}
