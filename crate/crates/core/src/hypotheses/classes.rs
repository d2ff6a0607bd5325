use serde::{Deserialize, Serialize};

use crate::bits::Bits;

/// Enumerable class of encoders `x -> [0, n_outputs)`.
///
/// Enumeration order is part of the contract: every ERM routine breaks ties
/// toward the lowest index.
pub trait EncoderClass: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn n_outputs(&self) -> usize;

    fn encode(&self, index: usize, obs: &Bits) -> usize;

    fn describe(&self, index: usize) -> String {
        format!("encoder#{index}")
    }
}

/// Enumerable class of binary classifiers.
pub trait ClassifierClass: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn classify(&self, index: usize, obs: &Bits) -> bool;

    /// Number of samples each classifier labels 1, indexed by classifier.
    fn positive_counts(&self, samples: &[&Bits]) -> Vec<usize> {
        (0..self.len())
            .map(|g| samples.iter().filter(|x| self.classify(g, x)).count())
            .collect()
    }
}

/// Coordinate projections `x -> x[i]` for `i` in `0..width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordinateEncoders {
    pub width: usize,
}

impl EncoderClass for CoordinateEncoders {
    fn len(&self) -> usize {
        self.width
    }

    fn n_outputs(&self) -> usize {
        2
    }

    #[inline]
    fn encode(&self, index: usize, obs: &Bits) -> usize {
        usize::from(obs.get(index))
    }

    fn describe(&self, index: usize) -> String {
        format!("x[{index}]")
    }
}

/// Coordinate projections and their negations: index `2i` is `x[i]`, index
/// `2i + 1` is `1 - x[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedCoordinates {
    pub width: usize,
}

impl SignedCoordinates {
    pub fn coordinate(index: usize) -> (usize, bool) {
        (index / 2, index % 2 == 1)
    }
}

impl ClassifierClass for SignedCoordinates {
    fn len(&self) -> usize {
        2 * self.width
    }

    fn classify(&self, index: usize, obs: &Bits) -> bool {
        let (i, negated) = Self::coordinate(index);
        obs.get(i) ^ negated
    }

    fn positive_counts(&self, samples: &[&Bits]) -> Vec<usize> {
        let mut ones = vec![0usize; self.width];
        for x in samples {
            for i in x.iter_ones() {
                ones[i] += 1;
            }
        }
        ones.iter().flat_map(|&c| [c, samples.len() - c]).collect()
    }
}

impl EncoderClass for SignedCoordinates {
    fn len(&self) -> usize {
        2 * self.width
    }

    fn n_outputs(&self) -> usize {
        2
    }

    fn encode(&self, index: usize, obs: &Bits) -> usize {
        usize::from(self.classify(index, obs))
    }

    fn describe(&self, index: usize) -> String {
        match Self::coordinate(index) {
            (i, false) => format!("x[{i}]"),
            (i, true) => format!("1-x[{i}]"),
        }
    }
}

/// Encoders given as lookup tables over small observations: the observation
/// is read as an unsigned integer (bit 0 least significant) and indexes each table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupEncoders {
    pub tables: Vec<Vec<usize>>,
    pub n_outputs: usize,
}

pub(crate) fn obs_key(obs: &Bits) -> usize {
    obs.words().first().copied().unwrap_or(0) as usize
}

impl EncoderClass for LookupEncoders {
    fn len(&self) -> usize {
        self.tables.len()
    }

    fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    fn encode(&self, index: usize, obs: &Bits) -> usize {
        self.tables[index][obs_key(obs)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupClassifiers {
    pub tables: Vec<Vec<bool>>,
}

impl ClassifierClass for LookupClassifiers {
    fn len(&self) -> usize {
        self.tables.len()
    }

    fn classify(&self, index: usize, obs: &Bits) -> bool {
        self.tables[index][obs_key(obs)]
    }
}

/// An encoder returned by a learning routine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearnedEncoder {
    /// Maps every observation to state 0.
    Constant,
    /// Class member `index` followed by the output relabeling `relabel[v]`.
    Relabeled { index: usize, relabel: Vec<usize> },
}

impl LearnedEncoder {
    pub fn encode(&self, class: &dyn EncoderClass, obs: &Bits) -> usize {
        match self {
            LearnedEncoder::Constant => 0,
            LearnedEncoder::Relabeled { index, relabel } => relabel[class.encode(*index, obs)],
        }
    }

    pub fn class_index(&self) -> Option<usize> {
        match self {
            LearnedEncoder::Constant => None,
            LearnedEncoder::Relabeled { index, .. } => Some(*index),
        }
    }
}
