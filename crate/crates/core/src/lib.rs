//! Latent-state discovery from two agents' action-free trajectories in
//! exogenous block MDPs, with the toy benchmark, shortcut baselines and
//! evaluation used to compare them.

pub mod baselines;
pub mod bits;
pub mod craft;
pub mod error;
pub mod eval;
pub mod exbmdp;
pub mod experiment;
pub mod hypotheses;
pub mod toy;

pub use bits::Bits;
pub use error::{Error, Result};
