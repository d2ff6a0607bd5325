//! Discretized log-odds predictors `f(x, y) = table[phi(x), phi'(y)]` and
//! their exact minimizer under the logistic loss
//!
//! `sum_A ln(1 + e^{-f}) + sum_B ln(1 + e^{f})`.
//!
//! For a fixed encoder pair the loss separates over the `k x k'` table
//! buckets, so each entry is chosen independently as the grid value that
//! minimizes `a ln(1 + e^{-c}) + b ln(1 + e^{c})` for that bucket's counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classes::EncoderClass;
use super::columns::OneHotColumns;
use super::grid::DiscreteGrid;
use crate::bits::Bits;
use crate::error::{Error, Result};

/// `ln(1 + e^{-c})`, stable for large `|c|`.
fn softplus_neg(c: f64) -> f64 {
    if c > 0.0 {
        (-c).exp().ln_1p()
    } else {
        -c + c.exp().ln_1p()
    }
}

/// Per-bucket logistic loss `a ln(1 + e^{-c}) + b ln(1 + e^{c})`.
pub fn bucket_loss(a: usize, b: usize, c: f64) -> f64 {
    a as f64 * softplus_neg(c) + b as f64 * softplus_neg(-c)
}

struct LossTable {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl LossTable {
    fn new(grid: &DiscreteGrid) -> Self {
        let values = grid.values();
        LossTable {
            pos: values.iter().map(|&c| softplus_neg(c)).collect(),
            neg: values.iter().map(|&c| softplus_neg(-c)).collect(),
        }
    }

    #[inline]
    fn argmin(&self, a: usize, b: usize) -> (usize, f64) {
        let (a, b) = (a as f64, b as f64);
        let mut best = (0, a * self.pos[0] + b * self.neg[0]);
        for j in 1..self.pos.len() {
            let l = a * self.pos[j] + b * self.neg[j];
            if l < best.1 {
                best = (j, l);
            }
        }
        best
    }
}

/// Grid index minimizing the bucket loss, ties toward the lowest value.
pub fn bucket_argmin(a: usize, b: usize, grid: &DiscreteGrid) -> (usize, f64) {
    LossTable::new(grid).argmin(a, b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddsPredictor {
    pub enc_h: usize,
    pub enc_next: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Grid indices, row-major over `(phi_h(x), phi_next(y))`.
    pub table: Vec<usize>,
    pub grid: DiscreteGrid,
}

impl OddsPredictor {
    /// Grid index predicted for the pair `(x, y)`.
    pub fn predict_index(&self, phi_h: &dyn EncoderClass, phi_next: &dyn EncoderClass, x: &Bits, y: &Bits) -> usize {
        let u = phi_h.encode(self.enc_h, x);
        let v = phi_next.encode(self.enc_next, y);
        self.table[u * self.n_cols + v]
    }

    pub fn predict(&self, phi_h: &dyn EncoderClass, phi_next: &dyn EncoderClass, x: &Bits, y: &Bits) -> f64 {
        self.grid.value(self.predict_index(phi_h, phi_next, x, y))
    }

    /// Fits the table for a fixed encoder pair from per-bucket counts.
    pub fn fit_table(enc_h: usize, enc_next: usize, counts: &BucketCounts, grid: DiscreteGrid) -> (Self, f64) {
        let losses = LossTable::new(&grid);
        let mut loss = 0.0;
        let table = counts
            .a
            .iter()
            .zip(&counts.b)
            .map(|(&a, &b)| {
                let (j, l) = losses.argmin(a, b);
                loss += l;
                j
            })
            .collect();
        (
            OddsPredictor {
                enc_h,
                enc_next,
                n_rows: counts.n_rows,
                n_cols: counts.n_cols,
                table,
                grid,
            },
            loss,
        )
    }
}

/// Bucket counts of one encoder pair for both agents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCounts {
    pub n_rows: usize,
    pub n_cols: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OddsFit {
    pub predictor: OddsPredictor,
    pub loss: f64,
    pub counts: BucketCounts,
}

/// Exact minimizer of the logistic loss over `phi_h x phi_next x (table -> grid)`.
///
/// Ties are broken by lowest `(enc_h, enc_next)` index, then lowest grid value.
pub fn erm_odds_predictor(
    pairs_a: &[(&Bits, &Bits)],
    pairs_b: &[(&Bits, &Bits)],
    phi_h: &dyn EncoderClass,
    phi_next: &dyn EncoderClass,
    grid: DiscreteGrid,
) -> Result<OddsFit> {
    if pairs_a.is_empty() || pairs_b.is_empty() {
        return Err(Error::Data("odds-predictor ERM needs pairs from both agents".into()));
    }
    if phi_h.is_empty() || phi_next.is_empty() {
        return Err(Error::InvalidArgument("encoder classes must be nonempty".into()));
    }
    fn split<'a>(pairs: &[(&'a Bits, &'a Bits)]) -> (Vec<&'a Bits>, Vec<&'a Bits>) {
        pairs.iter().copied().unzip()
    }
    let (xa, ya) = split(pairs_a);
    let (xb, yb) = split(pairs_b);
    let cols = [
        OneHotColumns::build(phi_h, &xa),
        OneHotColumns::build(phi_next, &ya),
        OneHotColumns::build(phi_h, &xb),
        OneHotColumns::build(phi_next, &yb),
    ];
    let losses = LossTable::new(&grid);
    let n_next = phi_next.len();

    // loss of the best table for every encoder pair, in enumeration order
    let pair_losses: Vec<f64> = (0..phi_h.len() * n_next)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(ca, cb), p| {
                let (e, f) = (p / n_next, p % n_next);
                cols[0].joint_counts(e, &cols[1], f, ca);
                cols[2].joint_counts(e, &cols[3], f, cb);
                ca.iter().zip(cb.iter()).map(|(&a, &b)| losses.argmin(a, b).1).sum()
            },
        )
        .collect();

    let mut best = 0;
    for (p, &l) in pair_losses.iter().enumerate() {
        if l < pair_losses[best] {
            best = p;
        }
    }
    let (e, f) = (best / n_next, best % n_next);
    let mut a = Vec::new();
    let mut b = Vec::new();
    cols[0].joint_counts(e, &cols[1], f, &mut a);
    cols[2].joint_counts(e, &cols[3], f, &mut b);
    let counts = BucketCounts {
        n_rows: phi_h.n_outputs(),
        n_cols: phi_next.n_outputs(),
        a,
        b,
    };
    let (predictor, loss) = OddsPredictor::fit_table(e, f, &counts, grid);
    Ok(OddsFit {
        predictor,
        loss,
        counts,
    })
}
