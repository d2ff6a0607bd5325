use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::dataset::TrajectoryDataset;
use super::empirical::TransitionCounts;
use crate::error::{Error, Result};

/// Known lower bounds the datasets are checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionBounds {
    pub nu: f64,
    pub eta: f64,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Pair coverage `|D*(s, s')| / (|A| + |B|) < nu`.
    PairCoverage,
    /// Log-ratio gap between two successors of the same state below `alpha`.
    Separation,
    /// Minority-agent share of a pair below `eta`.
    RelativeCoverage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: usize,
    /// `[s, s']` for coverage checks, `[s, s', s'']` for separation.
    pub states: Vec<usize>,
    pub kind: ViolationKind,
    pub value: f64,
}

/// Empirical coverage and separation quantities of a dataset pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Minimum pair coverage over observed transitions.
    pub nu_hat: f64,
    /// Minimum single-state coverage.
    pub nu_prime_hat: f64,
    /// Minimum share of the less represented agent over observed transitions.
    pub eta_hat: f64,
    /// Minimum over branching states of the log-ratio gap between the two
    /// agents' successor odds. `None` when no state has two successors
    /// observed by both agents.
    pub alpha_hat: Option<f64>,
    pub violations: Vec<Violation>,
}

pub fn check_assumptions(
    tau_a: &TrajectoryDataset,
    tau_b: &TrajectoryDataset,
    bounds: Option<AssumptionBounds>,
) -> Result<AssumptionReport> {
    if tau_a.horizon() != tau_b.horizon() {
        return Err(Error::Data(format!(
            "horizon mismatch: {} vs {}",
            tau_a.horizon(),
            tau_b.horizon()
        )));
    }
    if tau_a.is_empty() || tau_b.is_empty() {
        return Err(Error::Data("both datasets must be nonempty".into()));
    }
    let ca = TransitionCounts::from_dataset(tau_a)?;
    let cb = TransitionCounts::from_dataset(tau_b)?;
    let total = (tau_a.len() + tau_b.len()) as f64;
    let mut violations = Vec::new();

    let pairs: BTreeSet<(usize, usize, usize)> = ca.pairs.keys().chain(cb.pairs.keys()).copied().collect();
    let mut nu_hat = f64::INFINITY;
    let mut eta_hat = f64::INFINITY;
    for &(t, s, next) in &pairs {
        let (na, nb) = (ca.pair(t, s, next), cb.pair(t, s, next));
        let coverage = (na + nb) as f64 / total;
        let share = na.min(nb) as f64 / (na + nb) as f64;
        nu_hat = nu_hat.min(coverage);
        eta_hat = eta_hat.min(share);
        if let Some(b) = bounds {
            if coverage < b.nu {
                violations.push(Violation {
                    t,
                    states: vec![s, next],
                    kind: ViolationKind::PairCoverage,
                    value: coverage,
                });
            }
            if share < b.eta {
                violations.push(Violation {
                    t,
                    states: vec![s, next],
                    kind: ViolationKind::RelativeCoverage,
                    value: share,
                });
            }
        }
    }

    let states: BTreeSet<(usize, usize)> = ca.states.keys().chain(cb.states.keys()).copied().collect();
    let nu_prime_hat = states
        .iter()
        .map(|&(t, s)| (ca.state(t, s) + cb.state(t, s)) as f64 / total)
        .fold(f64::INFINITY, f64::min);

    // Gap for successors s1, s2 of s: |ln(nA1/nA2) - ln(nB1/nB2)|, which equals
    // the log-ratio of empirical-policy odds because row totals cancel.
    let mut alpha_hat: Option<f64> = None;
    for &(t, s) in &states {
        let succ: Vec<usize> = pairs
            .range((t, s, 0)..=(t, s, usize::MAX))
            .map(|&(_, _, n)| n)
            .collect();
        for (i, &s1) in succ.iter().enumerate() {
            for &s2 in &succ[i + 1..] {
                let counts = [
                    ca.pair(t, s, s1),
                    ca.pair(t, s, s2),
                    cb.pair(t, s, s1),
                    cb.pair(t, s, s2),
                ];
                if counts.contains(&0) {
                    // infinite gap: separation holds trivially
                    continue;
                }
                let [a1, a2, b1, b2] = counts.map(|c| (c as f64).ln());
                let gap = ((a2 - a1) - (b2 - b1)).abs();
                alpha_hat = Some(alpha_hat.map_or(gap, |a| a.min(gap)));
                if let Some(b) = bounds {
                    if gap < b.alpha {
                        violations.push(Violation {
                            t,
                            states: vec![s, s1, s2],
                            kind: ViolationKind::Separation,
                            value: gap,
                        });
                    }
                }
            }
        }
    }

    Ok(AssumptionReport {
        nu_hat,
        nu_prime_hat,
        eta_hat,
        alpha_hat,
        violations,
    })
}
