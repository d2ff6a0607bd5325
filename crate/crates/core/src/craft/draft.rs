use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exbmdp::ActionFreeDataset;
use crate::hypotheses::{EncoderClass, LearnedEncoder};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DraftOutput {
    /// `[constant, fitted]`.
    pub encoders: Vec<LearnedEncoder>,
    pub loss: f64,
}

/// Two-step hard-classification baseline: picks the binary encoder that best
/// separates the agents' second observations by minimizing
/// `(1/|A|) sum_A phi(x) + (1/|B|) sum_B (1 - phi(x))`, ties to the lowest index.
pub fn draft_run(tau_a: &ActionFreeDataset, tau_b: &ActionFreeDataset, phi: &dyn EncoderClass) -> Result<DraftOutput> {
    if tau_a.horizon() != 2 || tau_b.horizon() != 2 {
        return Err(Error::Precondition(format!(
            "the two-step baseline needs H = 2, got {} and {}",
            tau_a.horizon(),
            tau_b.horizon()
        )));
    }
    if tau_a.is_empty() || tau_b.is_empty() {
        return Err(Error::Data("both datasets must be nonempty".into()));
    }
    if phi.n_outputs() != 2 || phi.is_empty() {
        return Err(Error::InvalidArgument(
            "the encoder class must be nonempty and binary".into(),
        ));
    }
    let ones = |ds: &ActionFreeDataset, e: usize| (0..ds.len()).filter(|&i| phi.encode(e, ds.obs(i, 1)) == 1).count();
    let (na, nb) = (tau_a.len() as f64, tau_b.len() as f64);
    let mut best = (0, f64::INFINITY);
    for e in 0..phi.len() {
        let loss = ones(tau_a, e) as f64 / na + (tau_b.len() - ones(tau_b, e)) as f64 / nb;
        if loss < best.1 {
            best = (e, loss);
        }
    }
    Ok(DraftOutput {
        encoders: vec![
            LearnedEncoder::Constant,
            LearnedEncoder::Relabeled {
                index: best.0,
                relabel: vec![0, 1],
            },
        ],
        loss: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;
    use crate::exbmdp::Agent;
    use crate::hypotheses::CoordinateEncoders;

    fn ds(agent: Agent, second: &[&str]) -> ActionFreeDataset {
        let w = second[0].len();
        ActionFreeDataset::new(
            agent,
            2,
            w,
            second
                .iter()
                .map(|s| vec![Bits::zeros(w), Bits::parse_01(s).unwrap()])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_datasets_have_unit_loss_and_pick_first() {
        let a = ds(Agent::A, &["01", "10", "11"]);
        let b = ds(Agent::B, &["01", "10", "11"]);
        let out = draft_run(&a, &b, &CoordinateEncoders { width: 2 }).unwrap();
        assert_eq!(out.loss, 1.0);
        assert_eq!(out.encoders[1].class_index(), Some(0));
    }

    #[test]
    fn separable_hand_dataset() {
        // x[2] is 0 on every A sample and 1 on every B sample
        let a = ds(Agent::A, &["100", "010", "110", "000"]);
        let b = ds(Agent::B, &["101", "011", "001", "111"]);
        let out = draft_run(&a, &b, &CoordinateEncoders { width: 3 }).unwrap();
        assert_eq!(out.loss, 0.0);
        assert_eq!(out.encoders[1].class_index(), Some(2));
    }

    #[test]
    fn rejects_longer_horizons() {
        let a = ActionFreeDataset::new(Agent::A, 3, 1, vec![vec![Bits::zeros(1); 3]]).unwrap();
        assert!(matches!(
            draft_run(&a, &a, &CoordinateEncoders { width: 1 }),
            Err(Error::Precondition(_))
        ));
    }
}
