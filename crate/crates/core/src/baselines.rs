//! Mutual-information shortcut baselines: pick the feature (or consecutive
//! feature pair) whose value is most informative about which agent
//! collected the trajectory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exbmdp::ActionFreeDataset;
use crate::hypotheses::{EncoderClass, LearnedEncoder, OneHotColumns};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Feature {
    Single {
        t: usize,
        index: usize,
    },
    Pair {
        t: usize,
        index_h: usize,
        index_next: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiScore {
    pub feature: Feature,
    /// Plug-in mutual information with the agent label, in nats.
    pub mi: f64,
}

/// Plug-in mutual information (nats) of a `feature value x agent` count
/// table, with `0 ln 0 = 0`.
pub fn mutual_information(counts_a: &[usize], counts_b: &[usize]) -> f64 {
    assert_eq!(counts_a.len(), counts_b.len());
    let na: usize = counts_a.iter().sum();
    let nb: usize = counts_b.iter().sum();
    let n = (na + nb) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for (&ca, &cb) in counts_a.iter().zip(counts_b) {
        let cf = (ca + cb) as f64;
        for (c, nagent) in [(ca, na), (cb, nb)] {
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (cf * nagent as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

fn check(tau_a: &ActionFreeDataset, tau_b: &ActionFreeDataset, encoders: &[&dyn EncoderClass]) -> Result<usize> {
    if tau_a.horizon() != tau_b.horizon() {
        return Err(Error::Data("horizon mismatch".into()));
    }
    if tau_a.is_empty() || tau_b.is_empty() {
        return Err(Error::Data("both datasets must be nonempty".into()));
    }
    if encoders.len() != tau_a.horizon() {
        return Err(Error::InvalidArgument(format!(
            "expected {} encoder classes, got {}",
            tau_a.horizon(),
            encoders.len()
        )));
    }
    Ok(tau_a.horizon())
}

fn identity(index: usize, class: &dyn EncoderClass) -> LearnedEncoder {
    LearnedEncoder::Relabeled {
        index,
        relabel: (0..class.n_outputs()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleObsResult {
    pub encoders: Vec<LearnedEncoder>,
    pub scores: Vec<MiScore>,
}

/// Per timestep, the encoder maximizing `MI(phi(x_t); agent)`, ties to the lowest index.
pub fn single_obs_baseline(
    tau_a: &ActionFreeDataset,
    tau_b: &ActionFreeDataset,
    encoders: &[&dyn EncoderClass],
) -> Result<SingleObsResult> {
    let horizon = check(tau_a, tau_b, encoders)?;
    let picks: Vec<(LearnedEncoder, MiScore)> = (0..horizon)
        .into_par_iter()
        .map(|t| {
            let class = encoders[t];
            let ca = OneHotColumns::build(class, &tau_a.column(t));
            let cb = OneHotColumns::build(class, &tau_b.column(t));
            let mut best = (0, f64::NEG_INFINITY);
            for e in 0..class.len() {
                let mi = mutual_information(ca.marginal(e), cb.marginal(e));
                if mi > best.1 {
                    best = (e, mi);
                }
            }
            (
                identity(best.0, class),
                MiScore {
                    feature: Feature::Single { t, index: best.0 },
                    mi: best.1,
                },
            )
        })
        .collect();
    let (encoders, scores) = picks.into_iter().unzip();
    Ok(SingleObsResult { encoders, scores })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedObsResult {
    /// Encoder for `t` chosen from the window `(t, t + 1)`; `None` at the last step.
    pub forward: Vec<Option<LearnedEncoder>>,
    /// Encoder for `t` chosen from the window `(t - 1, t)`; `None` at the first step.
    pub backward: Vec<Option<LearnedEncoder>>,
    pub scores: Vec<MiScore>,
}

impl PairedObsResult {
    /// The one or two encoders selected for each timestep.
    pub fn encoders_at(&self, t: usize) -> Vec<&LearnedEncoder> {
        self.forward[t].iter().chain(self.backward[t].iter()).collect()
    }
}

/// Per consecutive window, the encoder pair maximizing
/// `MI((phi(x_t), phi'(x_{t+1})); agent)`, ties to the lowest `(index_h, index_next)`.
pub fn paired_obs_baseline(
    tau_a: &ActionFreeDataset,
    tau_b: &ActionFreeDataset,
    encoders: &[&dyn EncoderClass],
) -> Result<PairedObsResult> {
    let horizon = check(tau_a, tau_b, encoders)?;
    if horizon < 2 {
        return Err(Error::Data("paired baseline needs H >= 2".into()));
    }
    let cols: Vec<(OneHotColumns, OneHotColumns)> = (0..horizon)
        .into_par_iter()
        .map(|t| {
            (
                OneHotColumns::build(encoders[t], &tau_a.column(t)),
                OneHotColumns::build(encoders[t], &tau_b.column(t)),
            )
        })
        .collect();
    let scores: Vec<MiScore> = (0..horizon - 1)
        .into_par_iter()
        .map(|t| {
            let (ah, bh) = &cols[t];
            let (an, bn) = &cols[t + 1];
            let n_next = encoders[t + 1].len();
            let mis: Vec<f64> = (0..encoders[t].len() * n_next)
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new()),
                    |(ja, jb), p| {
                        let (e, f) = (p / n_next, p % n_next);
                        ah.joint_counts(e, an, f, ja);
                        bh.joint_counts(e, bn, f, jb);
                        mutual_information(ja, jb)
                    },
                )
                .collect();
            let mut best = 0;
            for (p, &mi) in mis.iter().enumerate() {
                if mi > mis[best] {
                    best = p;
                }
            }
            MiScore {
                feature: Feature::Pair {
                    t,
                    index_h: best / n_next,
                    index_next: best % n_next,
                },
                mi: mis[best],
            }
        })
        .collect();
    let mut forward = vec![None; horizon];
    let mut backward = vec![None; horizon];
    for s in &scores {
        if let Feature::Pair { t, index_h, index_next } = s.feature {
            forward[t] = Some(identity(index_h, encoders[t]));
            backward[t + 1] = Some(identity(index_next, encoders[t + 1]));
        }
    }
    Ok(PairedObsResult {
        forward,
        backward,
        scores,
    })
}
