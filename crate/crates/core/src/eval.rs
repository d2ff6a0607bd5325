//! Encoder accuracy: analytic population accuracy on the toy environment and
//! empirical accuracy up to a label bijection on labeled data.

use serde::{Deserialize, Serialize};

use crate::craft::StateAssignment;
use crate::error::{Error, Result};
use crate::exbmdp::{Agent, TrajectoryDataset, TransitionCounts};
use crate::hypotheses::{bucket_argmin, DiscreteGrid, EncoderClass, LearnedEncoder};
use crate::toy::ToyEnvSpec;

/// Which toy-compatible coordinate class an encoder index refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordinateClass {
    /// `index = i` reads `x[i]`.
    Plain,
    /// `index = 2i` reads `x[i]`, `2i + 1` reads `1 - x[i]`.
    Signed,
}

impl CoordinateClass {
    fn position(self, index: usize) -> usize {
        match self {
            CoordinateClass::Plain => index,
            CoordinateClass::Signed => index / 2,
        }
    }

    fn len(self, width: usize) -> usize {
        match self {
            CoordinateClass::Plain => width,
            CoordinateClass::Signed => 2 * width,
        }
    }
}

/// Population accuracy of a coordinate encoder at `t`: 1 for the
/// controllable bit, otherwise `max(Pr(e_t = 0), Pr(e_t = 1))` of the
/// distractor's chain. Encoders that send every observation to one label
/// score 1 at `t = 0` (single latent state) and 1/2 afterwards.
pub fn population_accuracy_toy(
    encoder: &LearnedEncoder,
    class: CoordinateClass,
    env: &ToyEnvSpec,
    t: usize,
) -> Result<f64> {
    if t >= env.horizon {
        return Err(Error::InvalidArgument(format!(
            "timestep {t} out of range 0..{}",
            env.horizon
        )));
    }
    let collapsed = if t == 0 { 1.0 } else { 0.5 };
    match encoder {
        LearnedEncoder::Constant => Ok(collapsed),
        LearnedEncoder::Relabeled { index, relabel } => {
            if *index >= class.len(env.width) || relabel.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "encoder {index} with relabel {relabel:?} is not a toy coordinate encoder"
                )));
            }
            if relabel[0] == relabel[1] {
                return Ok(collapsed);
            }
            let component = env.component_at(t, class.position(*index));
            if component == 0 {
                return Ok(1.0);
            }
            let p = env.exogenous_marginal(component, t)?;
            Ok(p.max(1.0 - p))
        }
    }
}

/// Best injective matching of learned labels to true labels, by exhaustive search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelAccuracy {
    /// Fraction of samples whose mapped learned label equals the true label.
    pub mean: f64,
    /// Smallest per-true-state accuracy under the same mapping.
    pub per_state_min: f64,
    /// `mapping[learned]` is the matched true label, `None` when unmatched.
    pub mapping: Vec<Option<usize>>,
}

const MAX_MATCH_LABELS: usize = 10;

fn best_matching(counts: &[Vec<usize>], n_true: usize) -> (usize, Vec<Option<usize>>) {
    fn go(
        l: usize,
        counts: &[Vec<usize>],
        used: &mut Vec<bool>,
        cur: &mut Vec<Option<usize>>,
        score: usize,
        best: &mut (usize, Vec<Option<usize>>),
    ) {
        if l == counts.len() {
            if score > best.0 || best.1.is_empty() {
                *best = (score, cur.clone());
            }
            return;
        }
        for s in 0..used.len() {
            if !used[s] {
                used[s] = true;
                cur.push(Some(s));
                go(l + 1, counts, used, cur, score + counts[l][s], best);
                cur.pop();
                used[s] = false;
            }
        }
        cur.push(None);
        go(l + 1, counts, used, cur, score, best);
        cur.pop();
    }
    let mut best = (0, Vec::new());
    go(0, counts, &mut vec![false; n_true], &mut Vec::new(), 0, &mut best);
    best
}

/// Accuracy of `predicted` against `truth` under the best injective relabeling.
pub fn label_accuracy(predicted: &[usize], truth: &[usize]) -> Result<LabelAccuracy> {
    if predicted.is_empty() {
        return Err(Error::Data("empty evaluation set".into()));
    }
    if predicted.len() != truth.len() {
        return Err(Error::InvalidArgument("prediction and label counts differ".into()));
    }
    let n_learned = predicted.iter().max().unwrap() + 1;
    let n_true = truth.iter().max().unwrap() + 1;
    if n_learned.max(n_true) > MAX_MATCH_LABELS {
        return Err(Error::InvalidArgument(format!(
            "exhaustive matching supports at most {MAX_MATCH_LABELS} labels"
        )));
    }
    let mut counts = vec![vec![0usize; n_true]; n_learned];
    let mut per_true = vec![0usize; n_true];
    for (&p, &s) in predicted.iter().zip(truth) {
        counts[p][s] += 1;
        per_true[s] += 1;
    }
    let (score, mapping) = best_matching(&counts, n_true);
    let mut hits = vec![0usize; n_true];
    for (l, m) in mapping.iter().enumerate() {
        if let Some(s) = m {
            hits[*s] += counts[l][*s];
        }
    }
    let per_state_min = (0..n_true)
        .filter(|&s| per_true[s] > 0)
        .map(|s| hits[s] as f64 / per_true[s] as f64)
        .fold(1.0, f64::min);
    Ok(LabelAccuracy {
        mean: score as f64 / predicted.len() as f64,
        per_state_min,
        mapping,
    })
}

/// Accuracy of `encoder` at `t` on a labeled evaluation dataset.
pub fn empirical_accuracy(
    encoder: &LearnedEncoder,
    class: &dyn EncoderClass,
    data: &TrajectoryDataset,
    t: usize,
) -> Result<LabelAccuracy> {
    if data.is_empty() {
        return Err(Error::Data("empty evaluation set".into()));
    }
    if t >= data.horizon() {
        return Err(Error::InvalidArgument(format!(
            "timestep {t} out of range 0..{}",
            data.horizon()
        )));
    }
    let labels = data.labels()?;
    let predicted: Vec<usize> = data
        .trajectories()
        .iter()
        .map(|tr| encoder.encode(class, &tr.observations[t]))
        .collect();
    let truth: Vec<usize> = labels.iter().map(|l| l[t]).collect();
    label_accuracy(&predicted, &truth)
}

/// Mean over timesteps. With `paired`, a timestep may carry two accuracies
/// (one per adjacent window), which are averaged first.
pub fn average_accuracy(per_t: &[Vec<f64>], paired: bool) -> Result<f64> {
    if per_t.is_empty() {
        return Err(Error::InvalidArgument("no timesteps".into()));
    }
    let mut total = 0.0;
    for (t, accs) in per_t.iter().enumerate() {
        let ok = if paired {
            matches!(accs.len(), 1 | 2)
        } else {
            accs.len() == 1
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "timestep {t} has {} accuracies",
                accs.len()
            )));
        }
        total += accs.iter().sum::<f64>() / accs.len() as f64;
    }
    Ok(total / per_t.len() as f64)
}

/// Per timestep, the number of trajectories (both agents) not covered by the
/// best injective matching of learned states to true states. Unassigned
/// trajectories always count as errors.
pub fn assignment_errors(
    assignment: &StateAssignment,
    labels_a: &[&[usize]],
    labels_b: &[&[usize]],
) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(assignment.steps.len());
    for (t, states) in assignment.steps.iter().enumerate() {
        let n_true = labels_a.iter().chain(labels_b).map(|l| l[t] + 1).max().unwrap_or(1);
        if states.len().max(n_true) > MAX_MATCH_LABELS {
            return Err(Error::InvalidArgument(format!(
                "exhaustive matching supports at most {MAX_MATCH_LABELS} states"
            )));
        }
        let mut counts = vec![vec![0usize; n_true]; states.len()];
        for (agent, labels) in [(Agent::A, labels_a), (Agent::B, labels_b)] {
            for (i, s) in assignment.labels_at(t, agent, labels.len()).into_iter().enumerate() {
                if let Some(s) = s {
                    counts[s][labels[i][t]] += 1;
                }
            }
        }
        let (score, _) = best_matching(&counts, n_true);
        out.push(labels_a.len() + labels_b.len() - score);
    }
    Ok(out)
}

/// One latent transition `(s, s_next)` at `t` seen through the ground-truth encoders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionLogOdds {
    pub t: usize,
    pub s: usize,
    pub s_next: usize,
    pub a: usize,
    pub b: usize,
    /// Table entry the log-odds ERM picks for this bucket.
    pub fitted: f64,
    /// `ln(a / b)` clamped to the grid range.
    pub target: f64,
}

/// Log-odds table for the ground-truth encoder pair at `t`, one entry per
/// transition observed by either agent.
pub fn ground_truth_log_odds(
    tau_a: &TrajectoryDataset,
    tau_b: &TrajectoryDataset,
    grid: &DiscreteGrid,
    t: usize,
) -> Result<Vec<TransitionLogOdds>> {
    if tau_a.horizon() != tau_b.horizon() || t + 1 >= tau_a.horizon() {
        return Err(Error::InvalidArgument(format!("no transition at t = {t}")));
    }
    let (ca, cb) = (
        TransitionCounts::from_dataset(tau_a)?,
        TransitionCounts::from_dataset(tau_b)?,
    );
    let mut keys: Vec<(usize, usize)> = ca
        .pairs
        .keys()
        .chain(cb.pairs.keys())
        .filter(|k| k.0 == t)
        .map(|k| (k.1, k.2))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    Ok(keys
        .into_iter()
        .map(|(s, s_next)| {
            let (a, b) = (ca.pair(t, s, s_next), cb.pair(t, s, s_next));
            let raw = (a as f64).ln() - (b as f64).ln();
            TransitionLogOdds {
                t,
                s,
                s_next,
                a,
                b,
                fitted: grid.value(bucket_argmin(a, b, grid).0),
                target: raw.clamp(grid.min_value(), grid.max_value()),
            }
        })
        .collect())
}

/// Every bucket with at least `min_samples` pairs has its table entry within
/// one grid step of its clamped log-odds.
pub fn predictor_within_one_step(buckets: &[TransitionLogOdds], grid: &DiscreteGrid, min_samples: usize) -> bool {
    buckets
        .iter()
        .filter(|x| x.a + x.b >= min_samples)
        .all(|x| (x.fitted - x.target).abs() <= grid.xi + 1e-12)
}

/// For every predecessor, the table entries of any two of its successors
/// differ by more than one grid step.
pub fn clusters_separated(buckets: &[TransitionLogOdds], grid: &DiscreteGrid) -> bool {
    buckets.iter().all(|x| {
        buckets
            .iter()
            .filter(|y| y.t == x.t && y.s == x.s && y.s_next != x.s_next)
            .all(|y| (x.fitted - y.fitted).abs() > grid.xi + 1e-12)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::ToyEnv;

    #[test]
    fn ground_truth_and_swapped_score_one() {
        let truth = [0, 1, 1, 0, 1];
        assert_eq!(label_accuracy(&truth, &truth).unwrap().mean, 1.0);
        let swapped: Vec<usize> = truth.iter().map(|&s| 1 - s).collect();
        let acc = label_accuracy(&swapped, &truth).unwrap();
        assert_eq!(acc.mean, 1.0);
        assert_eq!(acc.per_state_min, 1.0);
    }

    #[test]
    fn constant_on_balanced_scores_half() {
        let acc = label_accuracy(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap();
        assert_eq!(acc.mean, 0.5);
        assert_eq!(acc.per_state_min, 0.0);
    }

    #[test]
    fn extra_learned_labels_score_zero() {
        // three learned labels onto two true states: one label must stay unmatched
        let acc = label_accuracy(&[0, 1, 2, 2], &[0, 1, 1, 1]).unwrap();
        assert_eq!(acc.mean, 0.75);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(label_accuracy(&[], &[]).is_err());
    }

    #[test]
    fn averaging_rules() {
        assert_eq!(average_accuracy(&[vec![1.0], vec![1.0]], false).unwrap(), 1.0);
        assert_eq!(average_accuracy(&[vec![1.0], vec![0.5]], false).unwrap(), 0.75);
        let paired = average_accuracy(&[vec![1.0], vec![0.9, 0.8], vec![0.7]], true).unwrap();
        assert!((paired - (1.0 + 0.85 + 0.7) / 3.0).abs() < 1e-15);
        assert!(average_accuracy(&[vec![0.9, 0.8]], false).is_err());
    }

    #[test]
    fn log_odds_of_hand_counted_transitions() {
        use crate::bits::Bits;
        use crate::exbmdp::Trajectory;
        // A: 0->0 x3, 0->1 x1; B: 0->0 x1, 0->1 x3
        let ds = |agent, stays: usize, moves: usize| {
            let tr = |next: usize| Trajectory {
                observations: vec![Bits::zeros(1), Bits::zeros(1)],
                labels: Some(vec![0, next]),
            };
            let trs = (0..stays).map(|_| tr(0)).chain((0..moves).map(|_| tr(1))).collect();
            TrajectoryDataset::new(agent, 2, 1, trs).unwrap()
        };
        let grid = DiscreteGrid::new(12, 0.25);
        let out = ground_truth_log_odds(&ds(Agent::A, 3, 1), &ds(Agent::B, 1, 3), &grid, 0).unwrap();
        assert_eq!(out.len(), 2);
        // ln 3 = 1.0986 -> nearest grid value 1.0; ln(1/3) -> -1.0
        assert!((out[0].target - 3f64.ln()).abs() < 1e-12);
        assert_eq!(out[0].fitted, 1.0);
        assert_eq!(out[1].fitted, -1.0);
        assert!(predictor_within_one_step(&out, &grid, 0));
        assert!(clusters_separated(&out, &grid));
        let flat = ground_truth_log_odds(&ds(Agent::A, 2, 2), &ds(Agent::B, 2, 2), &grid, 0).unwrap();
        assert!(!clusters_separated(&flat, &grid));
    }

    #[test]
    fn toy_population_accuracy() {
        let env = ToyEnv::build(6, 8, 3).unwrap().params;
        for t in 0..6 {
            let ctrl = LearnedEncoder::Relabeled {
                index: env.position(t, 0),
                relabel: vec![1, 0],
            };
            assert_eq!(
                population_accuracy_toy(&ctrl, CoordinateClass::Plain, &env, t).unwrap(),
                1.0
            );
            let e1 = LearnedEncoder::Relabeled {
                index: env.position(t, 1),
                relabel: vec![0, 1],
            };
            assert_eq!(
                population_accuracy_toy(&e1, CoordinateClass::Plain, &env, t).unwrap(),
                0.5
            );
            let signed = LearnedEncoder::Relabeled {
                index: 2 * env.position(t, 0) + 1,
                relabel: vec![0, 1],
            };
            assert_eq!(
                population_accuracy_toy(&signed, CoordinateClass::Signed, &env, t).unwrap(),
                1.0
            );
        }
        let c = LearnedEncoder::Constant;
        assert_eq!(
            population_accuracy_toy(&c, CoordinateClass::Plain, &env, 0).unwrap(),
            1.0
        );
        assert_eq!(
            population_accuracy_toy(&c, CoordinateClass::Plain, &env, 2).unwrap(),
            0.5
        );
        let bad = LearnedEncoder::Relabeled {
            index: 8,
            relabel: vec![0, 1],
        };
        assert!(population_accuracy_toy(&bad, CoordinateClass::Plain, &env, 0).is_err());
    }

    #[test]
    fn distractor_uses_chain_marginal() {
        let mut env = ToyEnv::build(5, 3, 0).unwrap().params;
        env.chains[1] = crate::toy::ChainParams {
            init_zero: 0.7,
            flip_up: 0.2,
            flip_down: 0.4,
        };
        let enc = LearnedEncoder::Relabeled {
            index: env.position(2, 2),
            relabel: vec![0, 1],
        };
        let acc = population_accuracy_toy(&enc, CoordinateClass::Plain, &env, 2).unwrap();
        // 0.7 -> 0.7*0.8 + 0.3*0.4 = 0.68 -> 0.68*0.8 + 0.32*0.4 = 0.672
        assert!((acc - 0.672).abs() < 1e-12);
    }
}
