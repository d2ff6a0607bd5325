//! Latent-state discovery from two agents' action-free trajectories.
//!
//! For every consecutive pair of timesteps a discretized log-odds predictor
//! is fit to tell the agents apart. Then, moving forward in time, the pairs
//! starting in each learned state are bucketed by predicted log-odds; runs of
//! heavy buckets identify successor states, which are merged across
//! predecessors whenever no classifier can tell their observations apart.
//! Finally an encoder is fit to the assembled per-state observation sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{preprocess, CraftConfig, PreprocessedParams};
use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::exbmdp::{ActionFreeDataset, Agent};
use crate::hypotheses::{
    erm_binary_classifier, erm_multiclass_encoder, erm_odds_predictor, ClassifierClass, EncoderClass, LearnedEncoder,
    OddsFit,
};

/// Classifier losses in this band are close enough to the 0.5 merge threshold
/// that candidate order may have decided the outcome.
const NEAR_THRESHOLD: (f64, f64) = (0.45, 0.55);

/// Trajectory indices (per agent) assigned to one learned state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnedState {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl LearnedState {
    pub fn len(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }

    fn observations<'a>(&self, tau_a: &'a ActionFreeDataset, tau_b: &'a ActionFreeDataset, t: usize) -> Vec<&'a Bits> {
        self.a
            .iter()
            .map(|&i| tau_a.obs(i, t))
            .chain(self.b.iter().map(|&i| tau_b.obs(i, t)))
            .collect()
    }

    fn absorb(&mut self, members: &[(Agent, usize)]) {
        for &(agent, i) in members {
            match agent {
                Agent::A => self.a.push(i),
                Agent::B => self.b.push(i),
            }
        }
        self.a.sort_unstable();
        self.b.sort_unstable();
    }
}

/// Learned states per timestep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateAssignment {
    pub steps: Vec<Vec<LearnedState>>,
}

impl StateAssignment {
    /// Learned state of each trajectory at `t`, `None` when unassigned.
    pub fn labels_at(&self, t: usize, agent: Agent, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (s, state) in self.steps[t].iter().enumerate() {
            let idx = match agent {
                Agent::A => &state.a,
                Agent::B => &state.b,
            };
            for &i in idx {
                out[i].get_or_insert(s);
            }
        }
        out
    }

    /// True when no trajectory index belongs to two states at any timestep.
    pub fn is_disjoint(&self, n_a: usize, n_b: usize) -> bool {
        self.steps.iter().all(|states| {
            let mut seen_a = vec![false; n_a];
            let mut seen_b = vec![false; n_b];
            states.iter().all(|s| {
                s.a.iter().all(|&i| !std::mem::replace(&mut seen_a[i], true))
                    && s.b.iter().all(|&i| !std::mem::replace(&mut seen_b[i], true))
            })
        })
    }
}

/// Contiguous run of grid buckets identified as one successor cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterWindow {
    /// Heavy bucket that opened the window.
    pub start: usize,
    /// Inclusive bucket range `[lo, hi]` collected into the window.
    pub lo: usize,
    pub hi: usize,
    pub n_pairs: usize,
    /// Index in the next timestep's state list the window ended up in.
    pub state: usize,
    pub merged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeTest {
    pub s_pred: usize,
    pub window: usize,
    /// Candidate successor compared against.
    pub candidate: usize,
    pub classifier: usize,
    pub loss: f64,
    pub merged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredecessorScan {
    pub s_pred: usize,
    pub n_pairs: usize,
    /// Pair count per grid bucket.
    pub histogram: Vec<usize>,
    pub windows: Vec<ClusterWindow>,
}

/// Everything recorded while moving from `t` to `t + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub t: usize,
    pub odds: OddsFit,
    pub q_thresh: f64,
    /// `q_thresh * (|A| + |B|)`: minimum pair count of a heavy bucket.
    pub bucket_threshold: f64,
    pub scans: Vec<PredecessorScan>,
    pub merges: Vec<MergeTest>,
    /// Loss of the encoder fit for `t + 1` (absent when no state was found).
    pub encoder_loss: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CraftOutput {
    pub params: PreprocessedParams,
    /// One encoder per timestep; the first is constant.
    pub encoders: Vec<LearnedEncoder>,
    pub assignment: StateAssignment,
    pub steps: Vec<StepDiagnostics>,
    pub warnings: Vec<String>,
}

fn check_inputs(tau_a: &ActionFreeDataset, tau_b: &ActionFreeDataset) -> Result<usize> {
    if tau_a.horizon() != tau_b.horizon() {
        return Err(Error::Data(format!(
            "horizon mismatch: A has {}, B has {}",
            tau_a.horizon(),
            tau_b.horizon()
        )));
    }
    if tau_a.is_empty() || tau_b.is_empty() {
        return Err(Error::Data("both datasets must be nonempty".into()));
    }
    Ok(tau_a.horizon())
}

/// Fits the log-odds predictor for every consecutive timestep pair. The fits
/// are independent of each other.
pub fn fit_odds_predictors(
    tau_a: &ActionFreeDataset,
    tau_b: &ActionFreeDataset,
    params: &PreprocessedParams,
    encoders: &[&dyn EncoderClass],
) -> Result<Vec<OddsFit>> {
    let horizon = check_inputs(tau_a, tau_b)?;
    if encoders.len() != horizon {
        return Err(Error::InvalidArgument(format!(
            "expected {horizon} encoder classes, got {}",
            encoders.len()
        )));
    }
    (0..horizon - 1)
        .into_par_iter()
        .map(|t| {
            fn pairs(ds: &ActionFreeDataset, t: usize) -> Vec<(&Bits, &Bits)> {
                (0..ds.len()).map(|i| (ds.obs(i, t), ds.obs(i, t + 1))).collect()
            }
            erm_odds_predictor(
                &pairs(tau_a, t),
                &pairs(tau_b, t),
                encoders[t],
                encoders[t + 1],
                params.grid,
            )
        })
        .collect()
}

pub fn craft_run(
    tau_a: &ActionFreeDataset,
    tau_b: &ActionFreeDataset,
    config: &CraftConfig,
    encoders: &[&dyn EncoderClass],
    classifiers: &[&dyn ClassifierClass],
) -> Result<CraftOutput> {
    let params = preprocess(config)?;
    let horizon = check_inputs(tau_a, tau_b)?;
    if horizon < 2 {
        return Err(Error::Data("at least two timesteps are required".into()));
    }
    if classifiers.len() != horizon {
        return Err(Error::InvalidArgument(format!(
            "expected {horizon} classifier classes, got {}",
            classifiers.len()
        )));
    }
    let odds = fit_odds_predictors(tau_a, tau_b, &params, encoders)?;

    let (n_a, n_b) = (tau_a.len(), tau_b.len());
    let total = (n_a + n_b) as f64;
    let mut warnings = Vec::new();
    let mut assignment = StateAssignment {
        steps: vec![vec![LearnedState {
            a: (0..n_a).collect(),
            b: (0..n_b).collect(),
        }]],
    };
    let mut learned = vec![LearnedEncoder::Constant];
    let mut steps = Vec::with_capacity(horizon - 1);

    for (t, fit) in odds.into_iter().enumerate() {
        let f = &fit.predictor;
        let (phi_h, phi_next) = (encoders[t], encoders[t + 1]);
        let predict = |ds: &ActionFreeDataset| -> Vec<usize> {
            (0..ds.len())
                .into_par_iter()
                .map(|i| f.predict_index(phi_h, phi_next, ds.obs(i, t), ds.obs(i, t + 1)))
                .collect()
        };
        let (pred_a, pred_b) = (predict(tau_a), predict(tau_b));

        let q_thresh = (t + 1) as f64 * config.nu / (8.0 * horizon as f64);
        let threshold = q_thresh * total;
        let heavy = |count: usize| count as f64 >= threshold;

        let mut next: Vec<LearnedState> = Vec::new();
        let mut owner_a: Vec<Option<usize>> = vec![None; n_a];
        let mut owner_b: Vec<Option<usize>> = vec![None; n_b];
        let mut scans = Vec::new();
        let mut merges = Vec::new();

        for (s_pred, pred_state) in assignment.steps[t].iter().enumerate() {
            if pred_state.is_empty() {
                warnings.push(format!("t={t}: learned state {s_pred} has no trajectories, skipped"));
                continue;
            }
            let mut merged_already = vec![false; next.len()];
            let mut fresh: Vec<LearnedState> = Vec::new();

            let mut buckets: Vec<Vec<(Agent, usize)>> = vec![Vec::new(); params.grid.len()];
            for &i in &pred_state.a {
                buckets[pred_a[i]].push((Agent::A, i));
            }
            for &i in &pred_state.b {
                buckets[pred_b[i]].push((Agent::B, i));
            }
            let histogram: Vec<usize> = buckets.iter().map(Vec::len).collect();
            let mut windows = Vec::new();

            let n_xi = params.n_xi;
            let mut j = 0;
            while j <= n_xi {
                if !heavy(histogram[j]) {
                    j += 1;
                    continue;
                }
                let j_end = (j + 1..=n_xi).find(|&k| !heavy(histogram[k])).unwrap_or(n_xi);
                let lo = j.saturating_sub(1);
                let mut members: Vec<(Agent, usize)> = buckets[lo..=j_end].iter().flatten().copied().collect();
                members.retain(|&(agent, i)| {
                    let owner = match agent {
                        Agent::A => &owner_a[i],
                        Agent::B => &owner_b[i],
                    };
                    if let Some(prev) = owner {
                        warnings.push(format!(
                            "t={t}: trajectory {agent}{i} already assigned to state {prev}, keeping first assignment"
                        ));
                        false
                    } else {
                        true
                    }
                });
                if members.is_empty() {
                    warnings.push(format!(
                        "t={t}: empty cluster window [{lo}, {j_end}] for state {s_pred}, skipped"
                    ));
                    j = j_end + 2;
                    continue;
                }
                let d_new: Vec<&Bits> = members
                    .iter()
                    .map(|&(agent, i)| match agent {
                        Agent::A => tau_a.obs(i, t + 1),
                        Agent::B => tau_b.obs(i, t + 1),
                    })
                    .collect();

                let window_id = windows.len();
                let mut target = None;
                for (cand, state) in next.iter().enumerate() {
                    if merged_already[cand] {
                        continue;
                    }
                    let d_s = state.observations(tau_a, tau_b, t + 1);
                    let g = erm_binary_classifier(&d_new, &d_s, classifiers[t + 1])?;
                    let merged = g.loss > 0.5;
                    if g.loss > NEAR_THRESHOLD.0 && g.loss < NEAR_THRESHOLD.1 {
                        warnings.push(format!(
                            "t={t}: merge test of window {window_id} (state {s_pred}) against {cand} has loss {:.4}, near 0.5",
                            g.loss
                        ));
                    }
                    merges.push(MergeTest {
                        s_pred,
                        window: window_id,
                        candidate: cand,
                        classifier: g.index,
                        loss: g.loss,
                        merged,
                    });
                    if merged {
                        target = Some(cand);
                        break;
                    }
                }
                let (state_id, merged) = match target {
                    Some(cand) => {
                        next[cand].absorb(&members);
                        merged_already[cand] = true;
                        (cand, true)
                    }
                    None => {
                        let mut s = LearnedState::default();
                        s.absorb(&members);
                        fresh.push(s);
                        (next.len() + fresh.len() - 1, false)
                    }
                };
                for &(agent, i) in &members {
                    match agent {
                        Agent::A => owner_a[i] = Some(state_id),
                        Agent::B => owner_b[i] = Some(state_id),
                    }
                }
                windows.push(ClusterWindow {
                    start: j,
                    lo,
                    hi: j_end,
                    n_pairs: members.len(),
                    state: state_id,
                    merged,
                });
                j = j_end + 2;
            }

            scans.push(PredecessorScan {
                s_pred,
                n_pairs: pred_state.len(),
                histogram,
                windows,
            });
            next.extend(fresh);
        }

        if next.len() > config.max_states {
            return Err(Error::Precondition(format!(
                "timestep {}: found {} latent states, more than the cap of {}",
                t + 1,
                next.len(),
                config.max_states
            )));
        }

        let encoder_loss = if next.is_empty() {
            warnings.push(format!(
                "t={}: no successor states found, using a constant encoder",
                t + 1
            ));
            learned.push(LearnedEncoder::Constant);
            None
        } else {
            let sets: Vec<Vec<&Bits>> = next.iter().map(|s| s.observations(tau_a, tau_b, t + 1)).collect();
            let fit = erm_multiclass_encoder(&sets, encoders[t + 1])?;
            learned.push(fit.encoder);
            Some(fit.loss)
        };

        steps.push(StepDiagnostics {
            t,
            odds: fit,
            q_thresh,
            bucket_threshold: threshold,
            scans,
            merges,
            encoder_loss,
        });
        assignment.steps.push(next);
    }

    Ok(CraftOutput {
        params,
        encoders: learned,
        assignment,
        steps,
        warnings,
    })
}
