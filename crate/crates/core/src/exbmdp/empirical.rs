use std::collections::BTreeMap;

use super::dataset::{Agent, TrajectoryDataset};
use crate::error::Result;

/// Ground-truth transition counts `|D*(t, s, s')|` for one dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransitionCounts {
    pub pairs: BTreeMap<(usize, usize, usize), usize>,
    pub states: BTreeMap<(usize, usize), usize>,
}

impl TransitionCounts {
    pub fn from_dataset(ds: &TrajectoryDataset) -> Result<Self> {
        let mut out = TransitionCounts::default();
        for labels in ds.labels()? {
            for (t, &s) in labels.iter().enumerate() {
                *out.states.entry((t, s)).or_default() += 1;
            }
            for (t, w) in labels.windows(2).enumerate() {
                *out.pairs.entry((t, w[0], w[1])).or_default() += 1;
            }
        }
        Ok(out)
    }

    pub fn pair(&self, t: usize, s: usize, next: usize) -> usize {
        self.pairs.get(&(t, s, next)).copied().unwrap_or(0)
    }

    pub fn state(&self, t: usize, s: usize) -> usize {
        self.states.get(&(t, s)).copied().unwrap_or(0)
    }

    /// Number of transitions leaving `s` at `t`.
    pub fn outgoing(&self, t: usize, s: usize) -> usize {
        self.pairs.range((t, s, 0)..=(t, s, usize::MAX)).map(|(_, &c)| c).sum()
    }
}

/// Empirical policy `pi(s' | t, s)`: the fraction of transitions out of `s`
/// at `t` that land in `s'`.
///
/// Rows for states that were never left (unvisited, or the final step) are
/// absent; states the dataset suggests exist but never visits are listed in
/// `unvisited`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalPolicyTable {
    pub agent: Agent,
    pub entries: BTreeMap<(usize, usize, usize), f64>,
    pub unvisited: Vec<(usize, usize)>,
}

impl EmpiricalPolicyTable {
    pub fn get(&self, t: usize, s: usize, next: usize) -> Option<f64> {
        self.entries.get(&(t, s, next)).copied()
    }
}

pub fn empirical_policy(ds: &TrajectoryDataset) -> Result<EmpiricalPolicyTable> {
    let counts = TransitionCounts::from_dataset(ds)?;
    Ok(policy_from_counts(ds.agent(), ds.horizon(), &counts))
}

pub(crate) fn policy_from_counts(agent: Agent, horizon: usize, counts: &TransitionCounts) -> EmpiricalPolicyTable {
    let mut entries = BTreeMap::new();
    for (&(t, s, next), &c) in &counts.pairs {
        let total = counts.outgoing(t, s);
        entries.insert((t, s, next), c as f64 / total as f64);
    }
    let mut unvisited = Vec::new();
    for t in 0..horizon.saturating_sub(1) {
        let max_seen = counts
            .states
            .range((t, 0)..=(t, usize::MAX))
            .map(|(&(_, s), _)| s)
            .max();
        if let Some(max_seen) = max_seen {
            unvisited.extend((0..max_seen).filter(|&s| counts.state(t, s) == 0).map(|s| (t, s)));
        }
    }
    EmpiricalPolicyTable {
        agent,
        entries,
        unvisited,
    }
}
