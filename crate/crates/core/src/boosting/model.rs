use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_sorted, RegressionTree, SortedColumns};
use super::{BoostError, GbtParams};

pub const MODEL_FORMAT: &str = "freqstab-gbt";
pub const MODEL_VERSION: u32 = 1;

/// Feature matrix (NaN = missing) with targets and column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub x: Array2<f64>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, x: Array2<f64>, y: Vec<f64>) -> Result<Self, BoostError> {
        if x.ncols() != feature_names.len() {
            return Err(BoostError::FeatureMismatch { expected: feature_names.len(), got: x.ncols() });
        }
        if x.nrows() != y.len() {
            return Err(BoostError::LengthMismatch { expected: x.nrows(), got: y.len() });
        }
        Ok(Self { feature_names, x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            x: self.x.select(Axis(0), rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
        }
    }
}

/// One line of the training log; round 0 is the base score alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub train_mse: f64,
    pub valid_mse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub rounds_used: usize,
    pub rounds_run: usize,
    pub log: Vec<RoundLog>,
}

/// Additive tree ensemble: `base_score + Σ tree(x)`, learning rate folded
/// into the stored leaf weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub params: GbtParams,
    pub base_score: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<RegressionTree>,
    pub meta: TrainingMeta,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: GbtModel,
}

impl GbtModel {
    /// Model with no trees.
    pub fn constant(base_score: f64, feature_names: Vec<String>) -> Self {
        Self {
            params: GbtParams::default(),
            base_score,
            feature_names,
            trees: Vec::new(),
            meta: TrainingMeta { rounds_used: 0, rounds_run: 0, log: Vec::new() },
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut out = self.base_score;
        for tree in &self.trees {
            out += tree.predict_row(row);
        }
        out
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>, BoostError> {
        if x.ncols() != self.n_features() {
            return Err(BoostError::FeatureMismatch { expected: self.n_features(), got: x.ncols() });
        }
        Ok(x.rows().into_iter().map(|row| self.predict_row(row.as_slice().expect("row-major rows")))
            .collect())
    }

    /// Versioned JSON encoding; floats round-trip bit-exactly.
    pub fn to_json(&self) -> Result<String, BoostError> {
        let file = ModelFile { format: MODEL_FORMAT.into(), version: MODEL_VERSION, model: self.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self, BoostError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != MODEL_FORMAT {
            return Err(BoostError::Format(format!("unexpected format tag {:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(BoostError::Format(format!("unsupported model version {}", file.version)));
        }
        Ok(file.model)
    }
}

fn mse(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / y.len().max(1) as f64
}

/// Boosts squared-error trees until the validation error has not improved
/// for `early_stopping_rounds` rounds, then truncates to the best round.
/// Without a validation set all `max_rounds` trees are kept.
pub fn train_gbt(train: &Dataset, valid: Option<&Dataset>, params: &GbtParams) -> Result<GbtModel, BoostError> {
    params.validate()?;
    if train.is_empty() {
        return Err(BoostError::EmptyTrainingSet);
    }
    if let Some(v) = valid {
        if v.x.ncols() != train.x.ncols() {
            return Err(BoostError::FeatureMismatch { expected: train.x.ncols(), got: v.x.ncols() });
        }
    }
    let x = train.x.as_standard_layout();
    let n = train.len();
    let m = train.x.ncols();
    let base_score = train.y.iter().sum::<f64>() / n as f64;
    let sorted = SortedColumns::new(x.view());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut train_pred = vec![base_score; n];
    let valid_x = valid.map(|v| v.x.as_standard_layout().into_owned());
    let mut valid_pred = valid.map(|v| vec![base_score; v.len()]);
    let hessians = vec![1.0; n];
    let mut gradients = vec![0.0; n];

    let valid_mse = |pred: &Option<Vec<f64>>| pred.as_ref().zip(valid).map(|(p, v)| mse(p, &v.y));
    let mut log = vec![RoundLog { round: 0, train_mse: mse(&train_pred, &train.y), valid_mse: valid_mse(&valid_pred) }];
    let mut best = (0usize, log[0].valid_mse.unwrap_or(f64::INFINITY));
    let mut trees = Vec::new();

    for round in 1..=params.max_rounds {
        for i in 0..n {
            gradients[i] = train_pred[i] - train.y[i];
        }
        let rows: Vec<usize> = if params.subsample < 1.0 {
            let k = ((params.subsample * n as f64).round() as usize).clamp(1, n);
            let mut r = index::sample(&mut rng, n, k).into_vec();
            r.sort_unstable();
            r
        } else {
            (0..n).collect()
        };
        let columns: Vec<usize> = if params.colsample < 1.0 {
            let k = ((params.colsample * m as f64).ceil() as usize).clamp(1, m);
            let mut c = index::sample(&mut rng, m, k).into_vec();
            c.sort_unstable();
            c
        } else {
            (0..m).collect()
        };
        let mut tree = fit_tree_sorted(x.view(), &sorted, &gradients, &hessians, &rows, &columns, params)?;
        tree.scale(params.learning_rate);
        for (i, row) in x.rows().into_iter().enumerate() {
            train_pred[i] += tree.predict_row(row.as_slice().expect("standard layout"));
        }
        if let (Some(vx), Some(vp)) = (&valid_x, valid_pred.as_mut()) {
            for (i, row) in vx.rows().into_iter().enumerate() {
                vp[i] += tree.predict_row(row.as_slice().expect("standard layout"));
            }
        }
        trees.push(tree);
        let entry = RoundLog { round, train_mse: mse(&train_pred, &train.y), valid_mse: valid_mse(&valid_pred) };
        let current = entry.valid_mse;
        log.push(entry);
        match current {
            Some(err) => {
                if err < best.1 {
                    best = (round, err);
                } else if round - best.0 >= params.early_stopping_rounds {
                    break;
                }
            }
            None => best = (round, f64::INFINITY),
        }
    }

    let rounds_run = trees.len();
    trees.truncate(best.0);
    Ok(GbtModel {
        params: params.clone(),
        base_score,
        feature_names: train.feature_names.clone(),
        trees,
        meta: TrainingMeta { rounds_used: best.0, rounds_run, log },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;

    fn linear_data(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        let y = x.rows().into_iter().map(|r| 3.0 * r[0]).collect();
        Dataset::new(vec!["a".into(), "b".into(), "c".into()], x, y).unwrap()
    }

    #[test]
    fn zero_tree_model_predicts_base() {
        let model = GbtModel::constant(1.5, vec!["a".into()]);
        let x = Array2::from_elem((3, 1), 7.0);
        assert_eq!(model.predict(x.view()).unwrap(), vec![1.5; 3]);
        assert!(matches!(model.predict(Array2::zeros((1, 2)).view()), Err(BoostError::FeatureMismatch { .. })));
    }

    #[test]
    fn patience_equal_to_max_rounds_keeps_every_tree() {
        let data = linear_data(200, 1);
        let p = GbtParams { max_rounds: 15, early_stopping_rounds: 15, max_depth: 3, ..Default::default() };
        let model = train_gbt(&data, Some(&data), &p).unwrap();
        assert_eq!(model.trees.len(), 15);
    }

    #[test]
    fn train_error_never_increases() {
        let data = linear_data(300, 2);
        let p = GbtParams { max_rounds: 60, max_depth: 3, learning_rate: 0.3, ..Default::default() };
        let model = train_gbt(&data, None, &p).unwrap();
        for w in model.meta.log.windows(2) {
            assert!(w[1].train_mse <= w[0].train_mse);
        }
    }

    #[test]
    fn model_json_round_trip_is_exact() {
        let data = linear_data(100, 3);
        let p = GbtParams { max_rounds: 10, subsample: 0.7, colsample: 0.6, seed: 9, ..Default::default() };
        let model = train_gbt(&data, None, &p).unwrap();
        let text = model.to_json().unwrap();
        let back = GbtModel::from_json(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn rejects_foreign_model_files() {
        let text = r#"{"format":"other","version":1,"model":{}}"#;
        assert!(GbtModel::from_json(text).is_err());
    }
}
