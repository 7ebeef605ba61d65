//! Second-order gradient boosting of regression trees with squared error.
//!
//! Trees are grown level by level with an exact greedy scan over presorted
//! feature values. Missing values (NaN) are routed by a per-node default
//! direction chosen during training.

mod cv;
mod model;
mod params;
mod split;
mod tree;

use thiserror::Error;

pub use cv::{grid_search_cv, CvOutcome, GridScore};
pub use model::{train_gbt, Dataset, GbtModel, RoundLog, TrainingMeta, MODEL_FORMAT, MODEL_VERSION};
pub use params::{GbtParams, ParamGrid};
pub use split::{kfold_assignments, split_dataset, DatasetSplit, MIN_ROWS};
pub use tree::{fit_tree, leaf_weight, split_gain, Node, RegressionTree, Split};

use crate::analysis::AnalysisError;

#[derive(Debug, Error)]
pub enum BoostError {
    #[error("need at least {min} rows with a present target, got {rows}")]
    TooFewRows { rows: usize, min: usize },
    #[error("parameter grid is empty")]
    EmptyGrid,
    #[error("model expects {expected} features, got {got}")]
    FeatureMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Score(#[from] AnalysisError),
}
