use serde::{Deserialize, Serialize};

/// Uniform grid `{-n*xi/2, -n*xi/2 + xi, ..., n*xi/2}` of `n + 1` values,
/// addressed by index `0..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGrid {
    pub n_xi: usize,
    pub xi: f64,
}

impl DiscreteGrid {
    pub fn new(n_xi: usize, xi: f64) -> Self {
        assert!(xi > 0.0 && xi.is_finite(), "grid step must be positive, got {xi}");
        DiscreteGrid { n_xi, xi }
    }

    pub fn len(&self) -> usize {
        self.n_xi + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, index: usize) -> f64 {
        assert!(index <= self.n_xi, "grid index {index} out of range 0..={}", self.n_xi);
        index as f64 * self.xi - self.n_xi as f64 * self.xi / 2.0
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.n_xi).map(|j| self.value(j)).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.value(0)
    }

    pub fn max_value(&self) -> f64 {
        self.value(self.n_xi)
    }

    /// Index of the grid value nearest to `x` (ties toward the lower index),
    /// clamped onto the grid range.
    pub fn nearest_index(&self, x: f64) -> usize {
        if x.is_nan() {
            return 0;
        }
        let pos = (x - self.min_value()) / self.xi;
        if pos <= 0.0 {
            return 0;
        }
        let lo = pos.floor();
        let idx = if pos - lo > 0.5 { lo + 1.0 } else { lo };
        (idx as usize).min(self.n_xi)
    }
}
