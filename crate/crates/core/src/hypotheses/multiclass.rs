use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classes::{EncoderClass, LearnedEncoder};
use crate::bits::Bits;
use crate::error::{Error, Result};

/// Largest label set the relabeling search will enumerate (`8!` permutations).
pub const MAX_RELABEL_WIDTH: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MulticlassFit {
    pub encoder: LearnedEncoder,
    pub loss: f64,
}

/// Fits an encoder to per-state observation sets by minimizing
/// `sum_s (1/|D_s|) sum_{x in D_s} 1[phi(x) != s]`.
///
/// The minimization runs over class members composed with every bijection of
/// `0..max(n_outputs, n_states)`, because the state numbering of the inputs is
/// arbitrary. Ties go to the lowest class index, then the lexicographically
/// smallest permutation.
pub fn erm_multiclass_encoder(datasets: &[Vec<&Bits>], class: &dyn EncoderClass) -> Result<MulticlassFit> {
    if datasets.is_empty() {
        return Err(Error::Data("multiclass encoder ERM needs at least one state".into()));
    }
    if let Some(s) = datasets.iter().position(Vec::is_empty) {
        return Err(Error::Data(format!("state {s} has no observations")));
    }
    if class.is_empty() {
        return Err(Error::InvalidArgument("encoder class is empty".into()));
    }
    let k = class.n_outputs();
    let n_states = datasets.len();
    let width = k.max(n_states);
    if width > MAX_RELABEL_WIDTH {
        return Err(Error::InvalidArgument(format!(
            "relabeling over {width} labels exceeds the supported {MAX_RELABEL_WIDTH}"
        )));
    }
    let perms: Vec<Vec<usize>> = (0..width).permutations(width).collect();
    let sizes: Vec<f64> = datasets.iter().map(|d| d.len() as f64).collect();

    let per_encoder: Vec<(usize, f64)> = (0..class.len())
        .into_par_iter()
        .map(|e| {
            // hits[s][v]: samples of state s that encoder e maps to v
            let hits: Vec<Vec<usize>> = datasets
                .iter()
                .map(|d| {
                    let mut row = vec![0usize; k];
                    for x in d {
                        row[class.encode(e, x)] += 1;
                    }
                    row
                })
                .collect();
            let mut best = (0, f64::INFINITY);
            for (pi, perm) in perms.iter().enumerate() {
                let mut loss = 0.0;
                for (s, size) in sizes.iter().enumerate() {
                    let correct = (0..k).find(|&v| perm[v] == s).map_or(0, |v| hits[s][v]);
                    loss += 1.0 - correct as f64 / size;
                }
                if loss < best.1 {
                    best = (pi, loss);
                }
            }
            best
        })
        .collect();

    let mut best = (0, per_encoder[0]);
    for (e, &cand) in per_encoder.iter().enumerate().skip(1) {
        if cand.1 < best.1 .1 {
            best = (e, cand);
        }
    }
    let (index, (perm_index, loss)) = best;
    Ok(MulticlassFit {
        encoder: LearnedEncoder::Relabeled {
            index,
            relabel: perms[perm_index][..k].to_vec(),
        },
        loss,
    })
}
