use rayon::prelude::*;

use super::classes::EncoderClass;
use crate::bits::Bits;

/// Per-encoder, per-output-value sample bitmaps.
///
/// `columns[e][v]` has bit `n` set when encoder `e` maps sample `n` to `v`.
/// Joint counts of two encoders over the same samples then reduce to
/// `popcount(columns[e][u] & other[f][v])`.
#[derive(Clone, Debug)]
pub struct OneHotColumns {
    n_samples: usize,
    n_outputs: usize,
    columns: Vec<Vec<Bits>>,
    marginals: Vec<Vec<usize>>,
}

impl OneHotColumns {
    pub fn build(class: &dyn EncoderClass, samples: &[&Bits]) -> Self {
        let k = class.n_outputs();
        let n = samples.len();
        let per_encoder: Vec<(Vec<Bits>, Vec<usize>)> = (0..class.len())
            .into_par_iter()
            .map(|e| {
                let mut cols = vec![Bits::zeros(n); k];
                let mut marg = vec![0usize; k];
                for (i, x) in samples.iter().enumerate() {
                    let v = class.encode(e, x);
                    assert!(v < k, "encoder {e} produced {v}, outside 0..{k}");
                    cols[v].set(i, true);
                    marg[v] += 1;
                }
                (cols, marg)
            })
            .collect();
        let (columns, marginals) = per_encoder.into_iter().unzip();
        OneHotColumns {
            n_samples: n,
            n_outputs: k,
            columns,
            marginals,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn marginal(&self, encoder: usize) -> &[usize] {
        &self.marginals[encoder]
    }

    /// Joint counts of `(self[e](x), other[f](y))` over aligned samples,
    /// row-major with `other.n_outputs()` columns.
    ///
    /// Only the leading `(k - 1) x (k' - 1)` block is popcounted; the last row
    /// and column follow from the marginals.
    pub fn joint_counts(&self, e: usize, other: &OneHotColumns, f: usize, out: &mut Vec<usize>) {
        debug_assert_eq!(self.n_samples, other.n_samples);
        let (k, kn) = (self.n_outputs, other.n_outputs);
        out.clear();
        out.resize(k * kn, 0);
        let row_m = &self.marginals[e];
        let col_m = &other.marginals[f];
        for u in 0..k - 1 {
            let mut row_rest = row_m[u];
            for v in 0..kn - 1 {
                let c = self.columns[e][u].and_count(&other.columns[f][v]);
                out[u * kn + v] = c;
                row_rest -= c;
            }
            out[u * kn + kn - 1] = row_rest;
        }
        let last = k - 1;
        let mut corner = row_m[last];
        for v in 0..kn - 1 {
            let above: usize = (0..last).map(|u| out[u * kn + v]).sum();
            let c = col_m[v] - above;
            out[last * kn + v] = c;
            corner -= c;
        }
        out[last * kn + kn - 1] = corner;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypotheses::LookupEncoders;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn joint_counts_match_direct_tally(
            keys in proptest::collection::vec((0usize..8, 0usize..8), 1..200),
            t1 in proptest::collection::vec(0usize..3, 8),
            t2 in proptest::collection::vec(0usize..3, 8),
        ) {
            let class = LookupEncoders { tables: vec![t1.clone(), t2.clone()], n_outputs: 3 };
            let to_bits = |k: usize| Bits::from_bools(&[(k & 1) == 1, (k & 2) == 2, (k & 4) == 4]);
            let xs: Vec<Bits> = keys.iter().map(|&(a, _)| to_bits(a)).collect();
            let ys: Vec<Bits> = keys.iter().map(|&(_, b)| to_bits(b)).collect();
            let cx = OneHotColumns::build(&class, &xs.iter().collect::<Vec<_>>());
            let cy = OneHotColumns::build(&class, &ys.iter().collect::<Vec<_>>());
            let mut out = Vec::new();
            for e in 0..2 {
                for f in 0..2 {
                    cx.joint_counts(e, &cy, f, &mut out);
                    let mut direct = vec![0usize; 9];
                    for &(a, b) in &keys {
                        direct[class.tables[e][a] * 3 + class.tables[f][b]] += 1;
                    }
                    prop_assert_eq!(&out, &direct);
                }
            }
        }
    }
}
