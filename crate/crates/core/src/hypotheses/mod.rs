//! Finite hypothesis classes and exact empirical-risk minimizers over them.

mod binary;
mod classes;
mod columns;
mod grid;
mod multiclass;
mod odds;

pub use binary::{erm_binary_classifier, ClassifierFit};
pub use classes::{
    ClassifierClass, CoordinateEncoders, EncoderClass, LearnedEncoder, LookupClassifiers, LookupEncoders,
    SignedCoordinates,
};
pub use columns::OneHotColumns;
pub use grid::DiscreteGrid;
pub use multiclass::{erm_multiclass_encoder, MulticlassFit, MAX_RELABEL_WIDTH};
pub use odds::{bucket_argmin, bucket_loss, erm_odds_predictor, BucketCounts, OddsFit, OddsPredictor};
