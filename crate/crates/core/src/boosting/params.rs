use serde::{Deserialize, Serialize};

use super::BoostError;

/// Hyperparameters of the boosted ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_child_weight: f64,
    pub l2_reg: f64,
    /// Minimum loss reduction a split must exceed.
    pub split_gain_floor: f64,
    pub subsample: f64,
    pub colsample: f64,
    pub max_rounds: usize,
    pub early_stopping_rounds: usize,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_depth: 6,
            min_child_weight: 1.0,
            l2_reg: 1.0,
            split_gain_floor: 0.0,
            subsample: 1.0,
            colsample: 1.0,
            max_rounds: 500,
            early_stopping_rounds: 20,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<(), BoostError> {
        let frac = |v: f64| v > 0.0 && v <= 1.0;
        if !frac(self.learning_rate) {
            return Err(BoostError::InvalidParams(format!("learning_rate {} not in (0, 1]", self.learning_rate)));
        }
        if self.max_depth < 1 {
            return Err(BoostError::InvalidParams("max_depth must be at least 1".into()));
        }
        if !frac(self.subsample) || !frac(self.colsample) {
            return Err(BoostError::InvalidParams("subsample and colsample must lie in (0, 1]".into()));
        }
        if self.max_rounds < 1 {
            return Err(BoostError::InvalidParams("max_rounds must be at least 1".into()));
        }
        if !(self.l2_reg >= 0.0) || !(self.min_child_weight >= 0.0) || !(self.split_gain_floor >= 0.0) {
            return Err(BoostError::InvalidParams("l2_reg, min_child_weight and split_gain_floor must be non-negative".into()));
        }
        Ok(())
    }
}

/// Cartesian hyperparameter grid. Fields not varied here are taken from `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamGrid {
    pub max_depth: Vec<usize>,
    pub learning_rate: Vec<f64>,
    pub min_child_weight: Vec<f64>,
    pub subsample: Vec<f64>,
    pub l2_reg: Vec<f64>,
    pub base: GbtParams,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            max_depth: vec![4, 6, 8],
            learning_rate: vec![0.05, 0.1],
            min_child_weight: vec![1.0, 5.0],
            subsample: vec![0.8, 1.0],
            l2_reg: vec![1.0, 10.0],
            base: GbtParams::default(),
        }
    }
}

impl ParamGrid {
    pub fn single(params: GbtParams) -> Self {
        Self {
            max_depth: vec![params.max_depth],
            learning_rate: vec![params.learning_rate],
            min_child_weight: vec![params.min_child_weight],
            subsample: vec![params.subsample],
            l2_reg: vec![params.l2_reg],
            base: params,
        }
    }

    /// Grid points in a fixed nesting order: depth, learning rate, child
    /// weight, subsample, then L2 regularisation.
    pub fn points(&self) -> Vec<GbtParams> {
        let mut out = Vec::new();
        for &max_depth in &self.max_depth {
            for &learning_rate in &self.learning_rate {
                for &min_child_weight in &self.min_child_weight {
                    for &subsample in &self.subsample {
                        for &l2_reg in &self.l2_reg {
                            out.push(GbtParams {
                                max_depth,
                                learning_rate,
                                min_child_weight,
                                subsample,
                                l2_reg,
                                ..self.base.clone()
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_48_points_in_order() {
        let pts = ParamGrid::default().points();
        assert_eq!(pts.len(), 48);
        assert_eq!(pts[0].max_depth, 4);
        assert_eq!(pts[0].l2_reg, 1.0);
        assert_eq!(pts[1].l2_reg, 10.0);
        assert_eq!(pts[47].max_depth, 8);
    }

    #[test]
    fn validation_rejects_bad_values() {
        assert!(GbtParams::default().validate().is_ok());
        for bad in [
            GbtParams { learning_rate: 0.0, ..Default::default() },
            GbtParams { learning_rate: 1.5, ..Default::default() },
            GbtParams { max_depth: 0, ..Default::default() },
            GbtParams { subsample: 0.0, ..Default::default() },
            GbtParams { colsample: 1.1, ..Default::default() },
            GbtParams { max_rounds: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
