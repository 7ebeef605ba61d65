use serde::{Deserialize, Serialize};

use super::{ExplainError, ShapResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourContribution {
    pub hour: u32,
    pub rows: usize,
    /// Mean model prediction over rows at this hour of day.
    pub mean_prediction: f64,
    /// Mean SHAP value of each selected feature, in `features` order.
    pub contributions: Vec<f64>,
    /// Summed mean SHAP value of the remaining features.
    pub residual: f64,
}

/// 24-row daily decomposition `⟨f⟩_h = φ₀ + Σ_j ⟨φ_j⟩_h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyDecomposition {
    pub base_value: f64,
    pub features: Vec<String>,
    /// `(1/24) Σ_h |⟨φ_j⟩_h|` of each selected feature.
    pub daily_effect: Vec<f64>,
    pub hours: Vec<HourContribution>,
}

impl DailyDecomposition {
    /// Largest per-hour `|φ₀ + Σ contributions + residual − ⟨f⟩_h|`.
    pub fn max_additivity_error(&self) -> f64 {
        self.hours
            .iter()
            .map(|h| (self.base_value + h.contributions.iter().sum::<f64>() + h.residual - h.mean_prediction).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-hour means of SHAP values, the `top_k` features by average daily
/// effect kept apart and the rest folded into a residual.
pub fn daily_profile_decomposition(result: &ShapResult, hours: &[u32], top_k: usize) -> Result<DailyDecomposition, ExplainError> {
    let n = result.n_rows();
    if hours.len() != n {
        return Err(ExplainError::MisalignedRows { rows: n, stamps: hours.len() });
    }
    let m = result.feature_names.len();
    let mut sums = vec![vec![0.0; m]; 24];
    let mut pred_sums = [0.0; 24];
    let mut counts = [0usize; 24];
    for (i, &h) in hours.iter().enumerate() {
        let h = h as usize % 24;
        counts[h] += 1;
        pred_sums[h] += result.predictions[i];
        for (s, v) in sums[h].iter_mut().zip(result.values.row(i)) {
            *s += v;
        }
    }
    if let Some(h) = counts.iter().position(|&c| c == 0) {
        return Err(ExplainError::EmptyHour(h as u32));
    }
    let means: Vec<Vec<f64>> = sums.iter().zip(&counts).map(|(s, &c)| s.iter().map(|v| v / c as f64).collect()).collect();
    let effect: Vec<f64> = (0..m).map(|j| means.iter().map(|row| row[j].abs()).sum::<f64>() / 24.0).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| effect[b].total_cmp(&effect[a]).then(a.cmp(&b)));
    order.truncate(top_k.min(m));

    let hours_out = (0..24)
        .map(|h| {
            let contributions: Vec<f64> = order.iter().map(|&j| means[h][j]).collect();
            let residual = (0..m).filter(|j| !order.contains(j)).map(|j| means[h][j]).sum();
            HourContribution { hour: h as u32, rows: counts[h], mean_prediction: pred_sums[h] / counts[h] as f64, contributions, residual }
        })
        .collect();
    Ok(DailyDecomposition {
        base_value: result.base_value,
        features: order.iter().map(|&j| result.feature_names[j].clone()).collect(),
        daily_effect: order.iter().map(|&j| effect[j]).collect(),
        hours: hours_out,
    })
}
