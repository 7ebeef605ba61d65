use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Hourly actual generation of one technology with its literature ramp
/// rate (fraction of capacity per minute).
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologySeries {
    pub name: String,
    pub generation: Vec<Option<f64>>,
    pub ramp_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocofRole {
    /// Fast and positively associated with RoCoF.
    Driving,
    /// Slow and negatively associated.
    Offsetting,
    /// Fast and negatively associated.
    Balancing,
    /// Slow with a non-negative association, or no association at all.
    Unexplained,
}

impl RocofRole {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Driving => "driving",
            Self::Offsetting => "offsetting",
            Self::Balancing => "balancing",
            Self::Unexplained => "unexplained",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoleThresholds {
    /// Relative speeds at or above this are fast.
    pub fast_speed: f64,
}

impl Default for RoleThresholds {
    fn default() -> Self {
        Self { fast_speed: 0.5 }
    }
}

/// Quadrant rule over relative speed and SHAP direction.
pub fn classify_rocof_role(speed: f64, direction: f64, thresholds: &RoleThresholds) -> RocofRole {
    let fast = speed >= thresholds.fast_speed;
    match (fast, direction) {
        (true, d) if d > 0.0 => RocofRole::Driving,
        (true, d) if d < 0.0 => RocofRole::Balancing,
        (false, d) if d < 0.0 => RocofRole::Offsetting,
        _ => RocofRole::Unexplained,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampSpeedRow {
    pub technology: String,
    /// Median absolute hourly change (MW/h).
    pub median_ramp: f64,
    pub ramp_rate: f64,
    pub relative_speed: f64,
    /// Zero median ramp.
    pub degenerate: bool,
    pub direction: Option<f64>,
    pub role: Option<RocofRole>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampSpeedTable {
    pub fastest: String,
    pub rows: Vec<RampSpeedRow>,
}

impl RampSpeedTable {
    /// Attaches SHAP directions and classifies every technology that has one.
    pub fn classify(&mut self, directions: &BTreeMap<String, f64>, thresholds: &RoleThresholds) {
        for row in &mut self.rows {
            if let Some(&d) = directions.get(&row.technology) {
                row.direction = Some(d);
                row.role = Some(classify_rocof_role(row.relative_speed, d, thresholds));
            }
        }
    }

    pub fn get(&self, technology: &str) -> Option<&RampSpeedRow> {
        self.rows.iter().find(|r| r.technology == technology)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `s_k = (ΔX_k/ΔX_m)(r_k/r_m)` with `m = argmax ΔX_k r_k` (first on ties).
pub fn relative_ramp_speeds(series: &[TechnologySeries]) -> Result<RampSpeedTable, AnalysisError> {
    let mut medians = Vec::with_capacity(series.len());
    for s in series {
        if !(s.ramp_rate > 0.0 && s.ramp_rate.is_finite()) {
            return Err(AnalysisError::InvalidRampRate { name: s.name.clone(), rate: s.ramp_rate });
        }
        let diffs: Vec<f64> = s.generation.windows(2).filter_map(|w| Some((w[1]? - w[0]?).abs())).collect();
        if diffs.is_empty() {
            return Err(AnalysisError::EmptySeries(s.name.clone()));
        }
        medians.push(median(diffs));
    }
    if series.is_empty() {
        return Err(AnalysisError::EmptySeries(String::new()));
    }
    let mut m = 0;
    for k in 1..series.len() {
        if medians[k] * series[k].ramp_rate > medians[m] * series[m].ramp_rate {
            m = k;
        }
    }
    let top = medians[m] * series[m].ramp_rate;
    let rows = series
        .iter()
        .zip(&medians)
        .enumerate()
        .map(|(k, (s, &dx))| RampSpeedRow {
            technology: s.name.clone(),
            median_ramp: dx,
            ramp_rate: s.ramp_rate,
            relative_speed: if k == m && top > 0.0 {
                1.0
            } else if top > 0.0 {
                (dx / medians[m]) * (s.ramp_rate / series[m].ramp_rate)
            } else {
                0.0
            },
            degenerate: dx == 0.0,
            direction: None,
            role: None,
        })
        .collect();
    Ok(RampSpeedTable { fastest: series[m].name.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tech(name: &str, step: f64, rate: f64) -> TechnologySeries {
        TechnologySeries {
            name: name.into(),
            generation: (0..50).map(|i| Some(if i % 2 == 0 { 0.0 } else { step })).collect(),
            ramp_rate: rate,
        }
    }

    #[test]
    fn half_magnitude_half_rate_is_a_quarter() {
        let t = relative_ramp_speeds(&[tech("gas", 200.0, 0.08), tech("coal", 100.0, 0.04)]).unwrap();
        assert_eq!(t.fastest, "gas");
        assert_eq!(t.get("gas").unwrap().relative_speed, 1.0);
        assert!((t.get("coal").unwrap().relative_speed - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let t = relative_ramp_speeds(&[tech("gas", 200.0, 0.08), tech("nuclear", 0.0, 0.02)]).unwrap();
        let row = t.get("nuclear").unwrap();
        assert!(row.degenerate);
        assert_eq!(row.relative_speed, 0.0);
    }

    #[test]
    fn median_uses_valid_pairs_only() {
        let s = TechnologySeries { name: "x".into(), generation: vec![Some(0.0), None, Some(5.0), Some(8.0), Some(1.0)], ramp_rate: 1.0 };
        // valid diffs: |8-5| = 3, |1-8| = 7 → median 5
        let t = relative_ramp_speeds(&[s]).unwrap();
        assert_eq!(t.rows[0].median_ramp, 5.0);
        let empty = TechnologySeries { name: "y".into(), generation: vec![Some(1.0), None], ramp_rate: 1.0 };
        assert!(matches!(relative_ramp_speeds(&[empty]), Err(AnalysisError::EmptySeries(_))));
        assert!(matches!(relative_ramp_speeds(&[tech("z", 1.0, 0.0)]), Err(AnalysisError::InvalidRampRate { .. })));
    }

    #[test]
    fn quadrants() {
        let th = RoleThresholds::default();
        assert_eq!(classify_rocof_role(1.0, 0.6, &th), RocofRole::Driving);
        assert_eq!(classify_rocof_role(0.05, -0.4, &th), RocofRole::Offsetting);
        assert_eq!(classify_rocof_role(0.9, -0.5, &th), RocofRole::Balancing);
        assert_eq!(classify_rocof_role(0.1, 0.3, &th), RocofRole::Unexplained);
        assert_eq!(classify_rocof_role(0.5, 0.1, &th), RocofRole::Driving);
        assert_eq!(classify_rocof_role(0.9, 0.0, &th), RocofRole::Unexplained);
    }

    #[test]
    fn classify_attaches_directions() {
        let mut t = relative_ramp_speeds(&[tech("gas", 200.0, 0.08), tech("coal", 100.0, 0.04)]).unwrap();
        let dirs = BTreeMap::from([("gas".to_string(), -0.5), ("coal".to_string(), -0.3)]);
        t.classify(&dirs, &RoleThresholds::default());
        assert_eq!(t.get("gas").unwrap().role, Some(RocofRole::Balancing));
        assert_eq!(t.get("coal").unwrap().role, Some(RocofRole::Offsetting));
    }

    proptest! {
        #[test]
        fn invariant_under_common_rate_rescaling(
            steps in prop::collection::vec(1.0f64..500.0, 1..6),
            rates in prop::collection::vec(0.001f64..0.2, 6),
            c in 0.01f64..100.0,
        ) {
            let a: Vec<TechnologySeries> = steps.iter().enumerate().map(|(i, &s)| tech(&format!("t{i}"), s, rates[i])).collect();
            let b: Vec<TechnologySeries> = a.iter().map(|t| TechnologySeries { ramp_rate: t.ramp_rate * c, ..t.clone() }).collect();
            let (ta, tb) = (relative_ramp_speeds(&a).unwrap(), relative_ramp_speeds(&b).unwrap());
            prop_assert_eq!(&ta.fastest, &tb.fastest);
            for (x, y) in ta.rows.iter().zip(&tb.rows) {
                prop_assert!((x.relative_speed - y.relative_speed).abs() < 1e-12);
                prop_assert!(x.relative_speed > 0.0 && x.relative_speed <= 1.0 + 1e-15);
            }
        }
    }
}
