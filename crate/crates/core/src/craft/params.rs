use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypotheses::DiscreteGrid;

/// Known lower bounds handed to the learner, plus the per-timestep state cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CraftConfig {
    /// Log-odds separation between the agents' successor preferences.
    pub alpha: f64,
    /// Minority-agent share of every latent transition, at most 1/2.
    pub eta: f64,
    /// Coverage of every latent transition.
    pub nu: f64,
    /// Upper bound on the number of latent states at any timestep.
    pub max_states: usize,
}

impl CraftConfig {
    /// Bounds of the two-agent toy environment: `alpha = ln 3`, `eta = 1/5`, `nu = 5/32`.
    pub fn toy() -> Self {
        CraftConfig {
            alpha: 3.0_f64.ln(),
            eta: 0.2,
            nu: 5.0 / 32.0,
            max_states: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "eta must lie in (0, 1/2], got {}",
                self.eta
            )));
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        if self.max_states == 0 {
            return Err(Error::InvalidArgument("max_states must be positive".into()));
        }
        Ok(())
    }
}

/// Derived grid parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessedParams {
    /// `min(1, alpha)`.
    pub alpha_clipped: f64,
    /// Grid step `alpha_clipped / 4`.
    pub xi: f64,
    /// `ceil(8 ln(1/eta - 1) / alpha_clipped)`.
    pub n_xi: usize,
    /// `1 / (1 + e^{n_xi alpha_clipped / 8})`, never above the input eta.
    pub eta_effective: f64,
    pub grid: DiscreteGrid,
}

pub fn preprocess(config: &CraftConfig) -> Result<PreprocessedParams> {
    config.validate()?;
    let alpha_clipped = config.alpha.min(1.0);
    let xi = alpha_clipped / 4.0;
    let raw = 8.0 * (1.0 / config.eta - 1.0).ln() / alpha_clipped;
    let n_xi = raw.ceil().max(0.0) as usize;
    let eta_effective = 1.0 / (1.0 + (n_xi as f64 * alpha_clipped / 8.0).exp());
    Ok(PreprocessedParams {
        alpha_clipped,
        xi,
        n_xi,
        eta_effective,
        grid: DiscreteGrid::new(n_xi, xi),
    })
}

/// Order-of-magnitude sample requirement per latent transition,
/// `H^2 (ln(|Phi|/delta) + N_s^2) / (nu eta^2 alpha^4) * max(1/nu^2, 1/(eps^2 nu'^2))`,
/// without the hidden constants and log factors. Reported as a diagnostic only.
#[allow(clippy::too_many_arguments)]
pub fn sample_complexity_scale(
    horizon: usize,
    class_size: usize,
    max_states: usize,
    delta: f64,
    epsilon: f64,
    nu: f64,
    nu_prime: f64,
    eta: f64,
    alpha: f64,
) -> f64 {
    let h = horizon as f64;
    let ns = max_states as f64;
    let lead = h * h * ((class_size as f64 / delta).ln() + ns * ns) / (nu * eta * eta * alpha.powi(4));
    lead * (1.0 / (nu * nu)).max(1.0 / (epsilon * epsilon * nu_prime * nu_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_bounds_give_thirteen_point_grid() {
        let p = preprocess(&CraftConfig::toy()).unwrap();
        assert_eq!(p.alpha_clipped, 1.0);
        assert_eq!(p.n_xi, 12);
        assert_eq!(p.xi, 0.25);
        assert!((p.eta_effective - 1.0 / (1.0 + 1.5_f64.exp())).abs() < 1e-15);
        assert!((p.eta_effective - 0.18243).abs() < 1e-5);
        assert!(p.eta_effective <= 0.2);
        let v = p.grid.values();
        assert_eq!(v.first(), Some(&-1.5));
        assert_eq!(v.last(), Some(&1.5));
        assert_eq!(v.len(), 13);
    }

    #[test]
    fn alpha_is_clipped_to_one() {
        let p = preprocess(&CraftConfig {
            alpha: 4.0,
            ..CraftConfig::toy()
        })
        .unwrap();
        assert_eq!(p.alpha_clipped, 1.0);
    }

    #[test]
    fn half_eta_collapses_grid_to_zero() {
        let p = preprocess(&CraftConfig {
            eta: 0.5,
            ..CraftConfig::toy()
        })
        .unwrap();
        assert_eq!(p.n_xi, 0);
        assert_eq!(p.grid.values(), vec![0.0]);
    }

    #[test]
    fn invalid_eta_is_rejected() {
        for eta in [0.0, -0.1, 1.0, 1.5, 0.7] {
            assert!(preprocess(&CraftConfig {
                eta,
                ..CraftConfig::toy()
            })
            .is_err());
        }
    }
}
