//! Exact Shapley attribution for boosted tree ensembles.
//!
//! First-order values come in two semantics: interventional (features
//! outside a coalition take values from background rows) and
//! path-dependent (cover-weighted conditional expectations along the
//! tree). Interaction values use the path-dependent recursion.

mod daily;
mod interventional;
mod path;
mod summary;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use daily::{daily_profile_decomposition, DailyDecomposition, HourContribution};
pub use interventional::interventional_shap;
pub use path::{path_dependent_shap, shap_interactions, InteractionResult};
pub use summary::{
    dependency_data, locate_step, mean_abs_importance, shap_feature_direction, top_k, union_of_top_k,
    DependencyTable, FeatureImportance, StepFit,
};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("background set is empty")]
    EmptyBackground,
    #[error("no rows to explain")]
    NoRows,
    #[error("tree {tree} node {node} has non-positive cover")]
    ZeroCoverNode { tree: usize, node: usize },
    #[error("model expects {expected} features, got {got}")]
    FeatureMismatch { expected: usize, got: usize },
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("{rows} SHAP rows but {stamps} timestamps")]
    MisalignedRows { rows: usize, stamps: usize },
    #[error("hour of day {0} has no rows")]
    EmptyHour(u32),
    #[error("feature {0:?} has fewer than two distinct values")]
    ConstantFeature(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapMode {
    Interventional,
    PathDependent,
}

impl ShapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Interventional => "interventional",
            Self::PathDependent => "path_dependent",
        }
    }
}

/// Per-row attributions. For every row `base_value + Σ_j values[[i, j]]`
/// equals `predictions[i]` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapResult {
    pub feature_names: Vec<String>,
    pub data: Array2<f64>,
    pub values: Array2<f64>,
    pub base_value: f64,
    pub predictions: Vec<f64>,
    pub mode: ShapMode,
    pub background_size: Option<usize>,
}

impl ShapResult {
    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn feature_index(&self, name: &str) -> Result<usize, ExplainError> {
        self.feature_names.iter().position(|n| n == name).ok_or_else(|| ExplainError::UnknownFeature(name.into()))
    }

    /// Largest `|φ₀ + Σφ − f(x)|` over rows.
    pub fn max_additivity_error(&self) -> f64 {
        self.values
            .rows()
            .into_iter()
            .zip(&self.predictions)
            .map(|(row, &f)| (self.base_value + row.sum() - f).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_width(expected: usize, got: usize) -> Result<(), ExplainError> {
    if expected != got {
        return Err(ExplainError::FeatureMismatch { expected, got });
    }
    Ok(())
}
