use serde::{Deserialize, Serialize};

use super::{r2_score, AnalysisError};

/// Test-set predictions of the three competing predictors for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPredictions {
    pub area: String,
    pub indicator: String,
    pub n_train: usize,
    pub y_test: Vec<f64>,
    pub full: Vec<f64>,
    pub day_ahead: Vec<f64>,
    pub profile: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRow {
    pub area: String,
    pub indicator: String,
    pub n_train: usize,
    pub n_test: usize,
    pub r2_full: f64,
    pub r2_day_ahead: f64,
    pub r2_profile: f64,
    pub gain_full_over_profile: Option<f64>,
    pub gain_day_ahead_over_profile: Option<f64>,
    pub gain_full_over_day_ahead: Option<f64>,
}

/// `numerator / denominator`, defined only for a positive denominator.
pub fn gain(numerator: f64, denominator: f64) -> Option<f64> {
    (denominator > 0.0).then(|| numerator / denominator)
}

impl PerformanceRow {
    pub fn from_predictions(p: &ScenarioPredictions) -> Result<Self, AnalysisError> {
        let r2_full = r2_score(&p.y_test, &p.full)?;
        let r2_day_ahead = r2_score(&p.y_test, &p.day_ahead)?;
        let r2_profile = r2_score(&p.y_test, &p.profile)?;
        Ok(Self {
            area: p.area.clone(),
            indicator: p.indicator.clone(),
            n_train: p.n_train,
            n_test: p.y_test.len(),
            r2_full,
            r2_day_ahead,
            r2_profile,
            gain_full_over_profile: gain(r2_full, r2_profile),
            gain_day_ahead_over_profile: gain(r2_day_ahead, r2_profile),
            gain_full_over_day_ahead: gain(r2_full, r2_day_ahead),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PerformanceReport {
    pub rows: Vec<PerformanceRow>,
}

impl PerformanceReport {
    pub fn build(scenarios: &[ScenarioPredictions]) -> Result<Self, AnalysisError> {
        Ok(Self { rows: scenarios.iter().map(PerformanceRow::from_predictions).collect::<Result<_, _>>()? })
    }

    pub fn get(&self, area: &str, indicator: &str) -> Option<&PerformanceRow> {
        self.rows.iter().find(|r| r.area == area && r.indicator == indicator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scenario(y: Vec<f64>, full: Vec<f64>, da: Vec<f64>, profile: Vec<f64>) -> ScenarioPredictions {
        ScenarioPredictions {
            area: "ce".into(),
            indicator: "rocof".into(),
            n_train: 10,
            y_test: y,
            full,
            day_ahead: da,
            profile,
        }
    }

    #[test]
    fn identical_feature_sets_give_unit_gain() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let m = vec![1.1, 1.9, 3.2, 3.9];
        let prof = vec![2.0, 2.0, 3.0, 3.0];
        let row = PerformanceRow::from_predictions(&scenario(y, m.clone(), m, prof)).unwrap();
        assert_eq!(row.gain_full_over_day_ahead, Some(1.0));
        assert_eq!(row.n_test, 4);
    }

    #[test]
    fn non_positive_profile_r2_leaves_gain_undefined() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let row = PerformanceRow::from_predictions(&scenario(y.clone(), y.clone(), y, vec![2.5; 4])).unwrap();
        assert_eq!(row.r2_profile, 0.0);
        assert_eq!(row.gain_full_over_profile, None);
        assert_eq!(row.gain_day_ahead_over_profile, None);
        assert_eq!(row.gain_full_over_day_ahead, Some(1.0));
    }

    proptest! {
        #[test]
        fn gains_survive_affine_target_rescaling(
            y in prop::collection::vec(-10.0f64..10.0, 8),
            e in prop::collection::vec(-1.0f64..1.0, 24),
            a in 0.1f64..50.0,
            b in -100.0f64..100.0,
        ) {
            let pert = |k: usize, s: f64| -> Vec<f64> { y.iter().enumerate().map(|(i, v)| v + s * e[k * 8 + i]).collect() };
            let base = scenario(y.clone(), pert(0, 0.5), pert(1, 1.0), pert(2, 2.0));
            let r = PerformanceRow::from_predictions(&base);
            prop_assume!(r.is_ok());
            let f = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| a * x + b).collect() };
            let scaled = scenario(f(&base.y_test), f(&base.full), f(&base.day_ahead), f(&base.profile));
            let (r, s) = (r.unwrap(), PerformanceRow::from_predictions(&scaled).unwrap());
            prop_assert!((r.r2_full - s.r2_full).abs() < 1e-9);
            prop_assert!((r.r2_profile - s.r2_profile).abs() < 1e-9);
            match (r.gain_full_over_day_ahead, s.gain_full_over_day_ahead) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0)),
                (None, None) => {}
                _ => prop_assume!(false),
            }
        }
    }
}
