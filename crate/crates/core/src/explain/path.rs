use ndarray::{Array2, Array3, ArrayView2};
use rayon::prelude::*;

use super::{check_width, ExplainError, ShapMode, ShapResult};
use crate::boosting::{GbtModel, RegressionTree};

#[derive(Debug, Clone, Copy, Default)]
struct PathElement {
    /// `usize::MAX` marks the root placeholder.
    feature: usize,
    zero_fraction: f64,
    one_fraction: f64,
    pweight: f64,
}

const NO_FEATURE: usize = usize::MAX;

fn extend_path(path: &mut [PathElement], depth: usize, zero: f64, one: f64, feature: usize) {
    path[depth] = PathElement { feature, zero_fraction: zero, one_fraction: one, pweight: if depth == 0 { 1.0 } else { 0.0 } };
    let d1 = (depth + 1) as f64;
    for i in (0..depth).rev() {
        path[i + 1].pweight += one * path[i].pweight * (i + 1) as f64 / d1;
        path[i].pweight = zero * path[i].pweight * (depth - i) as f64 / d1;
    }
}

fn unwind_path(path: &mut [PathElement], depth: usize, index: usize) {
    let one = path[index].one_fraction;
    let zero = path[index].zero_fraction;
    let d1 = (depth + 1) as f64;
    let mut next_one = path[depth].pweight;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = path[i].pweight;
            path[i].pweight = next_one * d1 / ((i + 1) as f64 * one);
            next_one = tmp - path[i].pweight * zero * (depth - i) as f64 / d1;
        } else {
            path[i].pweight = path[i].pweight * d1 / (zero * (depth - i) as f64);
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
}

fn unwound_path_sum(path: &[PathElement], depth: usize, index: usize) -> f64 {
    let one = path[index].one_fraction;
    let zero = path[index].zero_fraction;
    let d1 = (depth + 1) as f64;
    let mut next_one = path[depth].pweight;
    let mut total = 0.0;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = next_one * d1 / ((i + 1) as f64 * one);
            total += tmp;
            next_one = path[i].pweight - tmp * zero * (depth - i) as f64 / d1;
        } else if zero != 0.0 {
            total += path[i].pweight / zero / ((depth - i) as f64 / d1);
        }
    }
    total
}

/// Conditioning on one feature: `Some((j, true))` forces it present,
/// `Some((j, false))` absent.
type Condition = Option<(usize, bool)>;

struct TreeShap<'a> {
    tree: &'a RegressionTree,
    x: &'a [f64],
    condition: Condition,
}

impl TreeShap<'_> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        idx: usize,
        phi: &mut [f64],
        parent: &[PathElement],
        mut depth: usize,
        zero: f64,
        one: f64,
        feature: usize,
        fraction: f64,
    ) {
        if fraction == 0.0 {
            return;
        }
        let mut path = parent.to_vec();
        let conditioned = self.condition.map(|(j, _)| j);
        if self.condition.is_none() || conditioned != Some(feature) {
            extend_path(&mut path, depth, zero, one, feature);
        }
        let node = &self.tree.nodes[idx];
        let Some(split) = &node.split else {
            for i in 1..=depth {
                let w = unwound_path_sum(&path, depth, i);
                let el = path[i];
                phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * node.value * fraction;
            }
            return;
        };
        let (hot, cold) = if split.goes_left(self.x[split.feature]) { (split.left, split.right) } else { (split.right, split.left) };
        let hot_zero = self.tree.nodes[hot].cover / node.cover;
        let cold_zero = self.tree.nodes[cold].cover / node.cover;
        let (mut in_zero, mut in_one) = (1.0, 1.0);
        if let Some(k) = (0..=depth).find(|&k| path[k].feature == split.feature) {
            in_zero = path[k].zero_fraction;
            in_one = path[k].one_fraction;
            unwind_path(&mut path, depth, k);
            depth -= 1;
        }
        let (mut hot_fraction, mut cold_fraction) = (fraction, fraction);
        match self.condition {
            Some((j, true)) if j == split.feature => {
                cold_fraction = 0.0;
                depth = depth.wrapping_sub(1);
            }
            Some((j, false)) if j == split.feature => {
                hot_fraction *= hot_zero;
                cold_fraction *= cold_zero;
                depth = depth.wrapping_sub(1);
            }
            _ => {}
        }
        let next = depth.wrapping_add(1);
        self.recurse(hot, phi, &path, next, hot_zero * in_zero, in_one, split.feature, hot_fraction);
        self.recurse(cold, phi, &path, next, cold_zero * in_zero, 0.0, split.feature, cold_fraction);
    }

    fn run(&self, phi: &mut [f64]) {
        let depth = self.tree.depth();
        let buffer = vec![PathElement::default(); depth + 2];
        self.recurse(0, phi, &buffer, 0, 1.0, 1.0, NO_FEATURE, 1.0);
    }
}

fn check_covers(model: &GbtModel) -> Result<(), ExplainError> {
    for (t, tree) in model.trees.iter().enumerate() {
        for (n, node) in tree.nodes.iter().enumerate() {
            if node.split.is_some() && !(node.cover > 0.0) {
                return Err(ExplainError::ZeroCoverNode { tree: t, node: n });
            }
        }
    }
    Ok(())
}

fn path_base_value(model: &GbtModel) -> f64 {
    model.base_score + model.trees.iter().map(|t| t.root().value).sum::<f64>()
}

fn first_order(model: &GbtModel, x: &[f64]) -> Vec<f64> {
    let mut phi = vec![0.0; model.n_features()];
    for tree in &model.trees {
        TreeShap { tree, x, condition: None }.run(&mut phi);
    }
    phi
}

/// Path-dependent TreeSHAP: Shapley values of the game
/// `v(S) = E[f(x) | x_S]` under the trees' cover distribution. The base
/// value is the cover-weighted root expectation.
pub fn path_dependent_shap(model: &GbtModel, rows: ArrayView2<'_, f64>) -> Result<ShapResult, ExplainError> {
    let m = model.n_features();
    check_width(m, rows.ncols())?;
    check_covers(model)?;
    let rows = rows.as_standard_layout();
    let per_row: Vec<Vec<f64>> = (0..rows.nrows())
        .into_par_iter()
        .map(|i| first_order(model, rows.row(i).as_slice().expect("standard layout")))
        .collect();
    let mut values = Array2::zeros((rows.nrows(), m));
    for (i, phi) in per_row.iter().enumerate() {
        values.row_mut(i).assign(&ndarray::ArrayView1::from(phi));
    }
    let predictions = rows.rows().into_iter().map(|r| model.predict_row(r.as_slice().expect("standard layout"))).collect();
    Ok(ShapResult {
        feature_names: model.feature_names.clone(),
        data: rows.into_owned(),
        values,
        base_value: path_base_value(model),
        predictions,
        mode: ShapMode::PathDependent,
        background_size: None,
    })
}

/// Per-row symmetric interaction matrices whose row sums equal the
/// path-dependent first-order values.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionResult {
    pub feature_names: Vec<String>,
    /// Shape `(rows, features, features)`.
    pub values: Array3<f64>,
    pub first_order: Array2<f64>,
    pub base_value: f64,
    pub predictions: Vec<f64>,
}

impl InteractionResult {
    /// `Σ_rows |Φ_jk|` for `j ≠ k`, as a full matrix with a zero diagonal.
    pub fn off_diagonal_mass(&self) -> Array2<f64> {
        let m = self.feature_names.len();
        let mut out = Array2::zeros((m, m));
        for row in self.values.outer_iter() {
            for j in 0..m {
                for k in 0..m {
                    if j != k {
                        out[[j, k]] += row[[j, k]].abs();
                    }
                }
            }
        }
        out
    }

    /// Largest off-diagonal pair by total absolute mass, `(j, k)` with `j < k`.
    pub fn strongest_pair(&self) -> Option<(usize, usize, f64)> {
        let mass = self.off_diagonal_mass();
        let m = self.feature_names.len();
        let mut best: Option<(usize, usize, f64)> = None;
        for j in 0..m {
            for k in j + 1..m {
                if best.is_none_or(|b| mass[[j, k]] > b.2) {
                    best = Some((j, k, mass[[j, k]]));
                }
            }
        }
        best
    }
}

/// Shapley interaction values via conditioned path-dependent recursions:
/// `Φ_jk = (φ_k | j present − φ_k | j absent)/2`, symmetrised, with the
/// main effect `Φ_jj = φ_j − Σ_{k≠j} Φ_jk`.
pub fn shap_interactions(model: &GbtModel, rows: ArrayView2<'_, f64>) -> Result<InteractionResult, ExplainError> {
    let m = model.n_features();
    check_width(m, rows.ncols())?;
    check_covers(model)?;
    let rows = rows.as_standard_layout();
    let used: Vec<Vec<usize>> = model.trees.iter().map(RegressionTree::features_used).collect();

    let per_row: Vec<(Vec<f64>, Array2<f64>)> = (0..rows.nrows())
        .into_par_iter()
        .map(|i| {
            let x = rows.row(i);
            let x = x.as_slice().expect("standard layout");
            let phi = first_order(model, x);
            let mut raw = Array2::<f64>::zeros((m, m));
            let mut on = vec![0.0; m];
            let mut off = vec![0.0; m];
            for (tree, features) in model.trees.iter().zip(&used) {
                for &j in features {
                    on.iter_mut().for_each(|v| *v = 0.0);
                    off.iter_mut().for_each(|v| *v = 0.0);
                    TreeShap { tree, x, condition: Some((j, true)) }.run(&mut on);
                    TreeShap { tree, x, condition: Some((j, false)) }.run(&mut off);
                    for k in 0..m {
                        if k != j {
                            raw[[j, k]] += 0.5 * (on[k] - off[k]);
                        }
                    }
                }
            }
            let mut sym = Array2::<f64>::zeros((m, m));
            for j in 0..m {
                for k in j + 1..m {
                    let v = 0.5 * (raw[[j, k]] + raw[[k, j]]);
                    sym[[j, k]] = v;
                    sym[[k, j]] = v;
                }
            }
            for j in 0..m {
                let off_sum: f64 = (0..m).filter(|&k| k != j).map(|k| sym[[j, k]]).sum();
                sym[[j, j]] = phi[j] - off_sum;
            }
            (phi, sym)
        })
        .collect();

    let n = rows.nrows();
    let mut values = Array3::zeros((n, m, m));
    let mut first = Array2::zeros((n, m));
    for (i, (phi, sym)) in per_row.into_iter().enumerate() {
        values.index_axis_mut(ndarray::Axis(0), i).assign(&sym);
        first.row_mut(i).assign(&ndarray::ArrayView1::from(&phi));
    }
    let predictions = rows.rows().into_iter().map(|r| model.predict_row(r.as_slice().expect("standard layout"))).collect();
    Ok(InteractionResult {
        feature_names: model.feature_names.clone(),
        values,
        first_order: first,
        base_value: path_base_value(model),
        predictions,
    })
}
