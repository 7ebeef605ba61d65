use serde::{Deserialize, Serialize};

use super::{ExplainError, ShapResult};
use crate::analysis::pearson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub mean_abs_shap: f64,
    /// 1-based.
    pub rank: usize,
}

/// Features by mean |φ_j| descending; ties keep column order.
pub fn mean_abs_importance(result: &ShapResult) -> Vec<FeatureImportance> {
    let n = result.n_rows().max(1) as f64;
    let mut scored: Vec<(usize, f64)> = result
        .values
        .columns()
        .into_iter()
        .enumerate()
        .map(|(j, col)| (j, col.iter().map(|v| v.abs()).sum::<f64>() / n))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored
        .into_iter()
        .enumerate()
        .map(|(r, (j, v))| FeatureImportance { feature: result.feature_names[j].clone(), mean_abs_shap: v, rank: r + 1 })
        .collect()
}

pub fn top_k(ranking: &[FeatureImportance], k: usize) -> Vec<String> {
    ranking.iter().take(k).map(|f| f.feature.clone()).collect()
}

/// Union of per-ranking top-k sets, in first-seen order.
pub fn union_of_top_k(rankings: &[Vec<FeatureImportance>], k: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for ranking in rankings {
        for name in top_k(ranking, k) {
            if !out.contains(&name) {
                out.push(name);
            }
        }
    }
    out
}

/// Per-sample `(x_j, φ_j, x_k)` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyTable {
    pub feature: String,
    pub color_feature: String,
    pub x: Vec<f64>,
    pub shap: Vec<f64>,
    pub color: Vec<f64>,
}

pub fn dependency_data(result: &ShapResult, feature: &str, color_feature: &str) -> Result<DependencyTable, ExplainError> {
    let j = result.feature_index(feature)?;
    let k = result.feature_index(color_feature)?;
    Ok(DependencyTable {
        feature: feature.into(),
        color_feature: color_feature.into(),
        x: result.data.column(j).to_vec(),
        shap: result.values.column(j).to_vec(),
        color: result.data.column(k).to_vec(),
    })
}

/// Least-squares fit of `a + b·x + c·1[x ≥ threshold]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFit {
    pub threshold: f64,
    pub intercept: f64,
    pub slope: f64,
    pub jump: f64,
    pub sse: f64,
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][c] = b[r];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// Scans every threshold between consecutive distinct `x` values with at
/// least `min_side` points on each side; NaN pairs are dropped.
pub fn locate_step(x: &[f64], y: &[f64], min_side: usize) -> Option<StepFit> {
    let mut pts: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| a.is_finite() && b.is_finite()).map(|(a, b)| (*a, *b)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    let min_side = min_side.max(1);
    if n < 2 * min_side {
        return None;
    }
    // centring keeps the normal equations well conditioned
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let c: Vec<(f64, f64)> = pts.iter().map(|&(a, b)| (a - mx, b - my)).collect();
    let (sx, sxx, sy, sxy, syy) = c.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |s, &(a, b)| (s.0 + a, s.1 + a * a, s.2 + b, s.3 + a * b, s.4 + b * b));
    // right-hand suffix sums
    let (mut rn, mut rx, mut ry) = (0.0, 0.0, 0.0);
    let mut suffix = vec![(0.0, 0.0, 0.0); n + 1];
    for i in (0..n).rev() {
        rn += 1.0;
        rx += c[i].0;
        ry += c[i].1;
        suffix[i] = (rn, rx, ry);
    }
    let nf = n as f64;
    let mut best: Option<StepFit> = None;
    for split in min_side..=n - min_side {
        if pts[split - 1].0 == pts[split].0 {
            continue;
        }
        let (rn, rx, ry) = suffix[split];
        let a = [[nf, sx, rn], [sx, sxx, rx], [rn, rx, rn]];
        let b = [sy, sxy, ry];
        let Some(beta) = solve3(a, b) else { continue };
        let sse = (syy - beta[0] * b[0] - beta[1] * b[1] - beta[2] * b[2]).max(0.0);
        if best.is_none_or(|f| sse < f.sse) {
            let threshold = 0.5 * (pts[split - 1].0 + pts[split].0);
            best = Some(StepFit { threshold, intercept: beta[0] + my - beta[1] * mx, slope: beta[1], jump: beta[2], sse });
        }
    }
    best
}

/// Pearson correlation between a feature's values and its SHAP values over
/// rows where the feature is present.
pub fn shap_feature_direction(result: &ShapResult, feature: &str) -> Result<f64, ExplainError> {
    let j = result.feature_index(feature)?;
    let x: Vec<Option<f64>> = result.data.column(j).iter().map(|v| (!v.is_nan()).then_some(*v)).collect();
    let s: Vec<Option<f64>> = result.values.column(j).iter().map(|v| Some(*v)).collect();
    pearson(&x, &s, 2).ok_or_else(|| ExplainError::ConstantFeature(feature.into()))
}
