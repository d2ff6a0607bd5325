use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    A,
    B,
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::A => "A",
            Agent::B => "B",
        })
    }
}

impl FromStr for Agent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Agent::A),
            "B" => Ok(Agent::B),
            other => Err(Error::InvalidArgument(format!("unknown agent `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub observations: Vec<Bits>,
    /// Ground-truth latent labels, only present at generation time.
    pub labels: Option<Vec<usize>>,
}

/// Trajectories collected by one agent, possibly carrying ground-truth labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryDataset {
    agent: Agent,
    horizon: usize,
    obs_len: usize,
    trajectories: Vec<Trajectory>,
}

impl TrajectoryDataset {
    pub fn new(agent: Agent, horizon: usize, obs_len: usize, trajectories: Vec<Trajectory>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Data("horizon must be positive".into()));
        }
        let mut first_label = None;
        for (i, tr) in trajectories.iter().enumerate() {
            if tr.observations.len() != horizon {
                return Err(Error::Data(format!(
                    "trajectory {i} has {} observations, expected {horizon}",
                    tr.observations.len()
                )));
            }
            if let Some(o) = tr.observations.iter().find(|o| o.len() != obs_len) {
                return Err(Error::Data(format!(
                    "trajectory {i} has an observation of width {}, expected {obs_len}",
                    o.len()
                )));
            }
            if let Some(labels) = &tr.labels {
                if labels.len() != horizon {
                    return Err(Error::Data(format!(
                        "trajectory {i} has {} labels, expected {horizon}",
                        labels.len()
                    )));
                }
                match first_label {
                    None => first_label = Some(labels[0]),
                    Some(l) if l != labels[0] => {
                        return Err(Error::Data(format!(
                            "trajectory {i} starts in latent state {}, others start in {l}",
                            labels[0]
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(TrajectoryDataset {
            agent,
            horizon,
            obs_len,
            trajectories,
        })
    }

    pub fn agent(&self) -> Agent {
        self.agent
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    /// True when every trajectory carries labels.
    pub fn is_labeled(&self) -> bool {
        self.trajectories.iter().all(|t| t.labels.is_some())
    }

    /// Per-trajectory label sequences, or an error naming the first unlabeled trajectory.
    pub fn labels(&self) -> Result<Vec<&[usize]>> {
        self.trajectories
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.labels
                    .as_deref()
                    .ok_or_else(|| Error::Data(format!("trajectory {i} has no ground-truth labels")))
            })
            .collect()
    }

    /// Label-free view handed to learning algorithms.
    pub fn strip_labels(&self) -> ActionFreeDataset {
        ActionFreeDataset {
            agent: self.agent,
            horizon: self.horizon,
            obs_len: self.obs_len,
            trajectories: self.trajectories.iter().map(|t| t.observations.clone()).collect(),
        }
    }
}

/// Observation-only trajectories: what the learner is allowed to see.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionFreeDataset {
    agent: Agent,
    horizon: usize,
    obs_len: usize,
    trajectories: Vec<Vec<Bits>>,
}

impl ActionFreeDataset {
    pub fn new(agent: Agent, horizon: usize, obs_len: usize, trajectories: Vec<Vec<Bits>>) -> Result<Self> {
        let ds = TrajectoryDataset::new(
            agent,
            horizon,
            obs_len,
            trajectories
                .into_iter()
                .map(|observations| Trajectory {
                    observations,
                    labels: None,
                })
                .collect(),
        )?;
        Ok(ds.strip_labels())
    }

    pub fn agent(&self) -> Agent {
        self.agent
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn obs_len(&self) -> usize {
        self.obs_len
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn obs(&self, index: usize, t: usize) -> &Bits {
        &self.trajectories[index][t]
    }

    pub fn trajectory(&self, index: usize) -> &[Bits] {
        &self.trajectories[index]
    }

    /// All observations at timestep `t`, in trajectory order.
    pub fn column(&self, t: usize) -> Vec<&Bits> {
        self.trajectories.iter().map(|tr| &tr[t]).collect()
    }
}
