use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use super::{check_width, ExplainError, ShapMode, ShapResult};
use crate::boosting::{GbtModel, RegressionTree};

/// `w[a][b] = (a−1)!·b!/(a+b)!`, the Shapley weight a leaf with `a`
/// explicand-routed and `b` background-routed features gives each
/// explicand-routed feature; background-routed ones get `−w[b][a]`.
struct Weights {
    table: Vec<Vec<f64>>,
}

impl Weights {
    fn new(max: usize) -> Self {
        let mut fact = vec![1.0f64; 2 * max + 2];
        for i in 1..fact.len() {
            fact[i] = fact[i - 1] * i as f64;
        }
        let table = (0..=max)
            .map(|a| (0..=max).map(|b| if a == 0 { 0.0 } else { fact[a - 1] * fact[b] / fact[a + b] }).collect())
            .collect();
        Self { table }
    }
}

struct Walk<'a> {
    tree: &'a RegressionTree,
    x: &'a [f64],
    z: &'a [f64],
    weights: &'a Weights,
    from_x: Vec<usize>,
    from_z: Vec<usize>,
}

impl Walk<'_> {
    fn visit(&mut self, idx: usize, phi: &mut [f64]) {
        let node = &self.tree.nodes[idx];
        let Some(split) = &node.split else {
            let (a, b) = (self.from_x.len(), self.from_z.len());
            if a + b == 0 {
                return;
            }
            let v = node.value;
            let wa = self.weights.table[a][b];
            let wb = self.weights.table[b][a];
            for &i in &self.from_x {
                phi[i] += v * wa;
            }
            for &i in &self.from_z {
                phi[i] -= v * wb;
            }
            return;
        };
        let f = split.feature;
        let child = |left: bool| if left { split.left } else { split.right };
        let xl = split.goes_left(self.x[f]);
        let zl = split.goes_left(self.z[f]);
        if self.from_x.contains(&f) {
            self.visit(child(xl), phi);
        } else if self.from_z.contains(&f) {
            self.visit(child(zl), phi);
        } else if xl == zl {
            self.visit(child(xl), phi);
        } else {
            self.from_x.push(f);
            self.visit(child(xl), phi);
            self.from_x.pop();
            self.from_z.push(f);
            self.visit(child(zl), phi);
            self.from_z.pop();
        }
    }
}

/// Exact interventional Shapley values of `x` against every background row,
/// averaged over the background. The base value is the mean background
/// prediction.
pub fn interventional_shap(model: &GbtModel, rows: ArrayView2<'_, f64>, background: ArrayView2<'_, f64>) -> Result<ShapResult, ExplainError> {
    let m = model.n_features();
    check_width(m, rows.ncols())?;
    check_width(m, background.ncols())?;
    if background.nrows() == 0 {
        return Err(ExplainError::EmptyBackground);
    }
    let rows = rows.as_standard_layout();
    let background = background.as_standard_layout();
    let depth = model.trees.iter().map(RegressionTree::depth).max().unwrap_or(0);
    let weights = Weights::new(depth);
    let nb = background.nrows() as f64;
    let base_value = background.rows().into_iter().map(|z| model.predict_row(z.as_slice().expect("standard layout"))).sum::<f64>() / nb;

    let per_row: Vec<(Vec<f64>, f64)> = (0..rows.nrows())
        .into_par_iter()
        .map(|i| {
            let x = rows.row(i);
            let x = x.as_slice().expect("standard layout");
            let mut phi = vec![0.0; m];
            for z in background.rows() {
                let z = z.as_slice().expect("standard layout");
                for tree in &model.trees {
                    let mut walk = Walk { tree, x, z, weights: &weights, from_x: Vec::new(), from_z: Vec::new() };
                    walk.visit(0, &mut phi);
                }
            }
            for p in &mut phi {
                *p /= nb;
            }
            (phi, model.predict_row(x))
        })
        .collect();

    let mut values = Array2::zeros((rows.nrows(), m));
    let mut predictions = Vec::with_capacity(rows.nrows());
    for (i, (phi, pred)) in per_row.into_iter().enumerate() {
        values.row_mut(i).assign(&ndarray::ArrayView1::from(&phi));
        predictions.push(pred);
    }
    Ok(ShapResult {
        feature_names: model.feature_names.clone(),
        data: rows.into_owned(),
        values,
        base_value,
        predictions,
        mode: ShapMode::Interventional,
        background_size: Some(background.nrows()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosting::{Node, Split};
    use ndarray::array;

    pub(crate) fn stump(feature: usize, threshold: f64, left: f64, right: f64) -> RegressionTree {
        RegressionTree {
            nodes: vec![
                Node {
                    cover: 2.0,
                    value: 0.5 * (left + right),
                    split: Some(Split { feature, threshold, default_left: true, left: 1, right: 2, gain: 1.0 }),
                },
                Node { cover: 1.0, value: left, split: None },
                Node { cover: 1.0, value: right, split: None },
            ],
        }
    }

    fn model(trees: Vec<RegressionTree>, m: usize) -> GbtModel {
        let mut g = GbtModel::constant(0.0, (0..m).map(|i| format!("f{i}")).collect());
        g.trees = trees;
        g
    }

    #[test]
    fn single_split_attributes_leaf_difference() {
        let g = model(vec![stump(0, 0.5, 3.0, 7.0)], 3);
        let bg = array![[0.0, 1.0, 2.0], [0.2, 5.0, 1.0]];
        let r = interventional_shap(&g, array![[1.0, 0.0, 0.0]].view(), bg.view()).unwrap();
        assert_eq!(r.base_value, 3.0);
        assert_eq!(r.values.row(0).to_vec(), vec![4.0, 0.0, 0.0]);
    }

    #[test]
    fn explicand_equal_to_background_gets_zero() {
        let g = model(vec![stump(0, 0.5, 3.0, 7.0), stump(1, 0.0, -1.0, 2.0)], 2);
        let bg = array![[1.0, -1.0], [1.0, -1.0]];
        let r = interventional_shap(&g, bg.view(), bg.view()).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
        assert!(r.max_additivity_error() < 1e-12);
    }

    #[test]
    fn product_tree_splits_credit_evenly() {
        // f = 1 only when both features are high; x high on both, z low on both
        let tree = RegressionTree {
            nodes: vec![
                Node { cover: 4.0, value: 0.25, split: Some(Split { feature: 0, threshold: 0.5, default_left: true, left: 1, right: 2, gain: 1.0 }) },
                Node { cover: 2.0, value: 0.0, split: None },
                Node { cover: 2.0, value: 0.5, split: Some(Split { feature: 1, threshold: 0.5, default_left: true, left: 3, right: 4, gain: 1.0 }) },
                Node { cover: 1.0, value: 0.0, split: None },
                Node { cover: 1.0, value: 1.0, split: None },
            ],
        };
        let r = interventional_shap(&model(vec![tree], 2), array![[1.0, 1.0]].view(), array![[0.0, 0.0]].view()).unwrap();
        assert_eq!(r.values.row(0).to_vec(), vec![0.5, 0.5]);
    }

    #[test]
    fn missing_values_follow_default_direction() {
        let g = model(vec![stump(0, 0.5, 3.0, 7.0)], 1);
        let r = interventional_shap(&g, array![[f64::NAN]].view(), array![[1.0]].view()).unwrap();
        assert_eq!(r.values[[0, 0]], -4.0);
    }

    #[test]
    fn empty_background_is_an_error() {
        let g = model(vec![], 1);
        let bg = Array2::<f64>::zeros((0, 1));
        assert!(matches!(interventional_shap(&g, array![[1.0]].view(), bg.view()), Err(ExplainError::EmptyBackground)));
    }
}
