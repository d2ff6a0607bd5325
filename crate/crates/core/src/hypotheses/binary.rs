use serde::{Deserialize, Serialize};

use super::classes::ClassifierClass;
use crate::bits::Bits;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierFit {
    pub index: usize,
    pub loss: f64,
}

/// Exact minimizer of `(1/|P|) sum_P (1 - g(x)) + (1/|N|) sum_N g(x)` over
/// the class, ties toward the lowest index.
///
/// The loss lies in `[0, 2]`; identical multisets give exactly 1 for every `g`.
pub fn erm_binary_classifier(
    positives: &[&Bits],
    negatives: &[&Bits],
    class: &dyn ClassifierClass,
) -> Result<ClassifierFit> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::Data("binary classifier ERM needs two nonempty samples".into()));
    }
    if class.is_empty() {
        return Err(Error::InvalidArgument("classifier class is empty".into()));
    }
    let pos = class.positive_counts(positives);
    let neg = class.positive_counts(negatives);
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    let mut best = ClassifierFit {
        index: 0,
        loss: f64::INFINITY,
    };
    for (g, (&p, &n)) in pos.iter().zip(&neg).enumerate() {
        let loss = (positives.len() - p) as f64 / np + n as f64 / nn;
        if loss < best.loss {
            best = ClassifierFit { index: g, loss };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::SignedCoordinates;

    fn bits(v: &[&str]) -> Vec<Bits> {
        v.iter().map(|s| Bits::parse_01(s).unwrap()).collect()
    }

    #[test]
    fn identical_samples_cannot_beat_one() {
        let xs = bits(&["0110", "1010", "0001"]);
        let refs: Vec<&Bits> = xs.iter().collect();
        let fit = erm_binary_classifier(&refs, &refs, &SignedCoordinates { width: 4 }).unwrap();
        assert_eq!(fit.loss, 1.0);
        assert_eq!(fit.index, 0);
    }

    #[test]
    fn separable_gives_zero() {
        let p = bits(&["0110", "1111", "0100"]);
        let n = bits(&["0010", "1000", "0001"]);
        let fit = erm_binary_classifier(
            &p.iter().collect::<Vec<_>>(),
            &n.iter().collect::<Vec<_>>(),
            &SignedCoordinates { width: 4 },
        )
        .unwrap();
        assert_eq!(fit.loss, 0.0);
        assert_eq!(fit.index, 2); // x[1]
    }

    #[test]
    fn one_corrupted_element_costs_a_third() {
        // separable on x[1] except the last negative
        let p = bits(&["010", "110", "011"]);
        let n = bits(&["000", "101", "111"]);
        let class = SignedCoordinates { width: 3 };
        let pr: Vec<&Bits> = p.iter().collect();
        let nr: Vec<&Bits> = n.iter().collect();
        let fit = erm_binary_classifier(&pr, &nr, &class).unwrap();
        let enumerated = (0..6)
            .map(|g| {
                pr.iter().filter(|x| !class.classify(g, x)).count() as f64 / 3.0
                    + nr.iter().filter(|x| class.classify(g, x)).count() as f64 / 3.0
            })
            .fold(f64::INFINITY, f64::min);
        assert!((fit.loss - 1.0 / 3.0).abs() < 1e-12);
        assert!((enumerated - fit.loss).abs() < 1e-12);
    }

    #[test]
    fn empty_side_is_an_error() {
        let p = bits(&["01"]);
        assert!(erm_binary_classifier(&[&p[0]], &[], &SignedCoordinates { width: 2 }).is_err());
    }
}
