use chrono::{DateTime, Timelike, Utc};
use ndarray::{Array2, Axis};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::analysis::{r2_score, DailyProfilePredictor};
use crate::boosting::{grid_search_cv, split_dataset, train_gbt, CvOutcome, Dataset, DatasetSplit, GbtModel, ParamGrid};
use crate::explain::{interventional_shap, ShapResult};
use crate::ingest::{Availability, FeatureFrame};
use crate::signal::{Indicator, IndicatorTable};

/// Which feature columns a model may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Full,
    DayAhead,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::DayAhead => "day_ahead",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "full" => Some(Self::Full),
            "day_ahead" | "day-ahead" => Some(Self::DayAhead),
            _ => None,
        }
    }
}

/// Rows of a feature frame whose hour also carries a present target value.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetData {
    pub indicator: Indicator,
    pub scope: Scope,
    pub hours: Vec<DateTime<Utc>>,
    pub dataset: Dataset,
}

impl TargetData {
    pub fn hours_of_day(&self) -> Vec<u32> {
        self.hours.iter().map(|h| h.hour()).collect()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self { indicator: self.indicator, scope: self.scope, hours: rows.iter().map(|&r| self.hours[r]).collect(), dataset: self.dataset.subset(rows) }
    }
}

/// Joins features and indicators on the hour stamp. Hours without a target
/// value are dropped; missing features stay NaN.
pub fn target_data(frame: &FeatureFrame, indicators: &IndicatorTable, indicator: Indicator, scope: Scope) -> Result<TargetData, PipelineError> {
    let frame = match scope {
        Scope::Full => frame.clone(),
        Scope::DayAhead => frame.with_availability(Availability::DayAhead),
    };
    let names = frame.names();
    if names.is_empty() {
        return Err(PipelineError::Invariant(format!("no {} feature columns", scope.as_str())));
    }
    let x = frame.to_matrix(&names)?;
    let target = indicators.column(indicator);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut j = 0;
    for (i, h) in frame.hours.iter().enumerate() {
        while j < indicators.hours.len() && indicators.hours[j] < *h {
            j += 1;
        }
        if j < indicators.hours.len() && indicators.hours[j] == *h {
            if let Some(v) = target[j] {
                rows.push(i);
                y.push(v);
            }
        }
    }
    let hours = rows.iter().map(|&r| frame.hours[r]).collect();
    let x = x.select(Axis(0), &rows);
    Ok(TargetData { indicator, scope, hours, dataset: Dataset::new(names, x, y)? })
}

/// Named seeds of every stochastic stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub split: u64,
    pub cv: u64,
    pub model: u64,
    pub background: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self { split: 42, cv: 7, model: 1, background: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub folds: usize,
    pub grid: ParamGrid,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self { folds: 5, grid: ParamGrid::default() }
    }
}

/// A model trained under the split / grid search / early stopping protocol.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: GbtModel,
    pub split: DatasetSplit,
    pub cv: CvOutcome,
    pub test_r2: f64,
    pub test_predictions: Vec<f64>,
}

/// 64/16/20 split, k-fold grid search on the training part, then a final
/// fit on the training part that stops early on the validation part.
pub fn train_protocol(data: &TargetData, training: &TrainingConfig, seeds: &Seeds) -> Result<TrainOutcome, PipelineError> {
    let present: Vec<Option<f64>> = data.dataset.y.iter().map(|&v| Some(v)).collect();
    let split = split_dataset(&present, seeds.split)?;
    train_on_split(data, split, training, seeds)
}

pub fn train_on_split(data: &TargetData, split: DatasetSplit, training: &TrainingConfig, seeds: &Seeds) -> Result<TrainOutcome, PipelineError> {
    let train = data.dataset.subset(&split.train);
    let valid = data.dataset.subset(&split.valid);
    let test = data.dataset.subset(&split.test);
    let cv = grid_search_cv(&train, &training.grid, training.folds, seeds.cv)?;
    let params = crate::boosting::GbtParams { seed: seeds.model, ..cv.best.clone() };
    let model = train_gbt(&train, Some(&valid), &params)?;
    let test_predictions = model.predict(test.x.view())?;
    let test_r2 = r2_score(&test.y, &test_predictions)?;
    Ok(TrainOutcome { model, split, cv, test_r2, test_predictions })
}

/// Daily-profile predictions for the test rows, fitted on training and
/// validation rows together.
pub fn profile_predictions(data: &TargetData, split: &DatasetSplit) -> Result<Vec<f64>, PipelineError> {
    let hod = data.hours_of_day();
    let fit_rows: Vec<usize> = split.train.iter().chain(&split.valid).copied().collect();
    let profile = DailyProfilePredictor::fit(
        &fit_rows.iter().map(|&r| hod[r]).collect::<Vec<_>>(),
        &fit_rows.iter().map(|&r| data.dataset.y[r]).collect::<Vec<_>>(),
    )?;
    Ok(profile.predict(&split.test.iter().map(|&r| hod[r]).collect::<Vec<_>>())?)
}

/// Uniform sample of `size` training rows (all of them if fewer), in row order.
pub fn background_rows(split: &DatasetSplit, size: usize, seed: u64) -> Vec<usize> {
    let n = split.train.len();
    if size >= n {
        return split.train.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, n, size).into_iter().map(|i| split.train[i]).collect();
    picked.sort_unstable();
    picked
}

/// Rows whose predictions are attributed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplainRows {
    #[default]
    All,
    Test,
}

impl ExplainRows {
    pub fn select(self, split: &DatasetSplit, n_rows: usize) -> Vec<usize> {
        match self {
            Self::All => (0..n_rows).collect(),
            Self::Test => split.test.clone(),
        }
    }
}

/// Interventional SHAP values of `rows` against a training background.
pub fn explain_rows(model: &GbtModel, data: &TargetData, rows: &[usize], split: &DatasetSplit, background_size: usize, seed: u64) -> Result<ShapResult, PipelineError> {
    let bg = background_rows(split, background_size, seed);
    let x = &data.dataset.x;
    let rows: Array2<f64> = x.select(Axis(0), rows);
    let background: Array2<f64> = x.select(Axis(0), &bg);
    Ok(interventional_shap(model, rows.view(), background.view())?)
}

/// Area features from regional raw series: assembly, engineering and removal
/// of columns whose missing share exceeds the policy threshold.
#[derive(Debug, Clone)]
pub struct PreparedFeatures {
    pub frame: FeatureFrame,
    pub inputs: crate::ingest::AreaInputs,
    pub dropped: Vec<(String, f64)>,
}

pub fn prepare_features(
    raw: &[crate::ingest::RawSeries],
    policy: &crate::ingest::AggregationPolicy,
    options: &crate::ingest::EngineerOptions,
) -> Result<PreparedFeatures, PipelineError> {
    let inputs = crate::ingest::assemble_area(raw, policy)?;
    let mut frame = crate::ingest::engineer_features(&inputs.base, options)?;
    let dropped = frame.retain_dense(policy.nan_share_threshold);
    Ok(PreparedFeatures { frame, inputs, dropped })
}
