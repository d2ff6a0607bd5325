//! Two-agent latent-state discovery and its two-step precursor.

mod draft;
mod params;
mod run;

pub use draft::{draft_run, DraftOutput};
pub use params::{preprocess, sample_complexity_scale, CraftConfig, PreprocessedParams};
pub use run::{
    craft_run, fit_odds_predictors, ClusterWindow, CraftOutput, LearnedState, MergeTest, PredecessorScan,
    StateAssignment, StepDiagnostics,
};
