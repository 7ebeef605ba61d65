use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::{BoostError, GbtParams};

/// Internal-node routing rule. Present values `x < threshold` go left,
/// missing values follow `default_left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub default_left: bool,
    pub left: usize,
    pub right: usize,
    pub gain: f64,
}

impl Split {
    #[inline]
    pub fn goes_left(&self, x: f64) -> bool {
        if x.is_nan() {
            self.default_left
        } else {
            x < self.threshold
        }
    }
}

/// A tree node. `cover` is the hessian sum of the training rows that
/// reached it; `value` is the leaf weight for leaves and the
/// cover-weighted mean of the leaves below for internal nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub cover: f64,
    pub value: f64,
    pub split: Option<Split>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// Binary regression tree stored as a flat node array with the root at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn leaf(weight: f64, cover: f64) -> Self {
        Self { nodes: vec![Node { cover, value: weight, split: None }] }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut idx = 0;
        while let Some(split) = &self.nodes[idx].split {
            idx = if split.goes_left(row[split.feature]) { split.left } else { split.right };
        }
        idx
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.nodes[self.leaf_index(row)].value
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx].split {
                None => 0,
                Some(s) => 1 + walk(nodes, s.left).max(walk(nodes, s.right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Multiplies every leaf (and therefore every node value) by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for node in &mut self.nodes {
            node.value *= factor;
        }
    }

    pub fn features_used(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.nodes.iter().filter_map(|n| n.split.as_ref().map(|s| s.feature)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Restores `cover(parent) = cover(left) + cover(right)` and the
    /// cover-weighted node values bottom-up.
    fn finalize(&mut self) {
        fn walk(nodes: &mut [Node], idx: usize) -> (f64, f64) {
            let Some((l, r)) = nodes[idx].split.as_ref().map(|s| (s.left, s.right)) else {
                return (nodes[idx].cover, nodes[idx].value);
            };
            let (cl, vl) = walk(nodes, l);
            let (cr, vr) = walk(nodes, r);
            let cover = cl + cr;
            let value = if cover > 0.0 { (cl * vl + cr * vr) / cover } else { 0.5 * (vl + vr) };
            nodes[idx].cover = cover;
            nodes[idx].value = value;
            (cover, value)
        }
        walk(&mut self.nodes, 0);
    }
}

/// Rows of each feature presorted by value, with missing rows listed apart.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    order: Vec<Vec<u32>>,
    missing: Vec<Vec<u32>>,
}

impl SortedColumns {
    pub fn new(x: ArrayView2<'_, f64>) -> Self {
        let (n, m) = x.dim();
        let mut order = Vec::with_capacity(m);
        let mut missing = Vec::with_capacity(m);
        for f in 0..m {
            let col = x.column(f);
            let mut present: Vec<u32> = (0..n as u32).filter(|&r| !col[r as usize].is_nan()).collect();
            present.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            missing.push((0..n as u32).filter(|&r| col[r as usize].is_nan()).collect());
            order.push(present);
        }
        Self { order, missing }
    }
}

/// Split quality with L2 regularisation `λ` and gain floor `γ`.
#[inline]
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, l2: f64, floor: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + l2);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - floor
}

#[inline]
pub fn leaf_weight(g: f64, h: f64, l2: f64) -> f64 {
    -g / (h + l2)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    threshold: f64,
    default_left: bool,
    gain: f64,
}

struct Frontier {
    node: usize,
    g: f64,
    h: f64,
    best: Option<Candidate>,
}

/// Grows one tree by exact greedy level-wise search.
///
/// `rows` are the training rows drawn for this tree, `columns` the
/// candidate features. Unsplittable roots give a single-leaf tree with
/// weight `-G/(H+λ)`. Leaf weights are not scaled by the learning rate.
pub fn fit_tree(
    x: ArrayView2<'_, f64>,
    gradients: &[f64],
    hessians: &[f64],
    rows: &[usize],
    columns: &[usize],
    params: &GbtParams,
) -> Result<RegressionTree, BoostError> {
    let sorted = SortedColumns::new(x);
    fit_tree_sorted(x, &sorted, gradients, hessians, rows, columns, params)
}

pub(crate) fn fit_tree_sorted(
    x: ArrayView2<'_, f64>,
    sorted: &SortedColumns,
    gradients: &[f64],
    hessians: &[f64],
    rows: &[usize],
    columns: &[usize],
    params: &GbtParams,
) -> Result<RegressionTree, BoostError> {
    let n = x.nrows();
    if gradients.len() != n || hessians.len() != n {
        return Err(BoostError::LengthMismatch { expected: n, got: gradients.len().min(hessians.len()) });
    }
    if rows.is_empty() {
        return Err(BoostError::EmptyTrainingSet);
    }
    let l2 = params.l2_reg;
    const NONE: u32 = u32::MAX;
    // node id of each sampled row, NONE for rows outside the sample
    let mut position = vec![NONE; n];
    let (mut g0, mut h0) = (0.0, 0.0);
    for &r in rows {
        position[r] = 0;
        g0 += gradients[r];
        h0 += hessians[r];
    }
    let mut nodes = vec![Node { cover: h0, value: leaf_weight(g0, h0, l2), split: None }];
    let mut frontier = vec![Frontier { node: 0, g: g0, h: h0, best: None }];
    // frontier slot of each node id, NONE when the node is not being expanded
    let mut slot_of: Vec<u32> = vec![0];

    for _depth in 0..params.max_depth {
        if frontier.is_empty() {
            break;
        }
        let k = frontier.len();
        let mut gl = vec![0.0; k];
        let mut hl = vec![0.0; k];
        let mut last: Vec<f64> = vec![f64::NAN; k];
        let mut mg = vec![0.0; k];
        let mut mh = vec![0.0; k];
        for &f in columns {
            gl.iter_mut().for_each(|v| *v = 0.0);
            hl.iter_mut().for_each(|v| *v = 0.0);
            mg.iter_mut().for_each(|v| *v = 0.0);
            mh.iter_mut().for_each(|v| *v = 0.0);
            last.iter_mut().for_each(|v| *v = f64::NAN);
            for &r in &sorted.missing[f] {
                let p = position[r as usize];
                if p == NONE || slot_of[p as usize] == NONE {
                    continue;
                }
                let s = slot_of[p as usize] as usize;
                mg[s] += gradients[r as usize];
                mh[s] += hessians[r as usize];
            }
            for &r in &sorted.order[f] {
                let r = r as usize;
                let p = position[r];
                if p == NONE || slot_of[p as usize] == NONE {
                    continue;
                }
                let s = slot_of[p as usize] as usize;
                let v = x[[r, f]];
                if !last[s].is_nan() && v > last[s] {
                    let threshold = midpoint(last[s], v);
                    consider(&mut frontier[s], f, threshold, gl[s], hl[s], mg[s], mh[s], params);
                }
                gl[s] += gradients[r];
                hl[s] += hessians[r];
                last[s] = v;
            }
            // all present values left, missing values right
            for s in 0..k {
                if mh[s] > 0.0 && !last[s].is_nan() {
                    consider(&mut frontier[s], f, f64::MAX, gl[s], hl[s], mg[s], 0.0, params);
                }
            }
        }

        let mut next = Vec::new();
        let mut any_split = false;
        for fr in &frontier {
            let Some(best) = fr.best else { continue };
            any_split = true;
            let left = nodes.len();
            let right = left + 1;
            nodes.push(Node { cover: 0.0, value: 0.0, split: None });
            nodes.push(Node { cover: 0.0, value: 0.0, split: None });
            nodes[fr.node].split = Some(Split {
                feature: best.feature,
                threshold: best.threshold,
                default_left: best.default_left,
                left,
                right,
                gain: best.gain,
            });
        }
        if !any_split {
            break;
        }
        // route sampled rows into the new children and accumulate their sums
        let mut sums = vec![(0.0f64, 0.0f64); nodes.len()];
        for &r in rows {
            let p = position[r] as usize;
            if let Some(split) = &nodes[p].split {
                if slot_of.get(p).is_some_and(|s| *s != NONE) {
                    let child = if split.goes_left(x[[r, split.feature]]) { split.left } else { split.right };
                    position[r] = child as u32;
                    sums[child].0 += gradients[r];
                    sums[child].1 += hessians[r];
                }
            }
        }
        slot_of = vec![NONE; nodes.len()];
        for fr in &frontier {
            let Some(split) = nodes[fr.node].split.clone() else { continue };
            for child in [split.left, split.right] {
                let (g, h) = sums[child];
                nodes[child].cover = h;
                nodes[child].value = leaf_weight(g, h, l2);
                slot_of[child] = next.len() as u32;
                next.push(Frontier { node: child, g, h, best: None });
            }
        }
        frontier = next;
    }

    let mut tree = RegressionTree { nodes };
    tree.finalize();
    Ok(tree)
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid > lo && mid <= hi {
        mid
    } else {
        hi
    }
}

#[allow(clippy::too_many_arguments)]
#[inline]
fn consider(fr: &mut Frontier, feature: usize, threshold: f64, gl: f64, hl: f64, mg: f64, mh: f64, params: &GbtParams) {
    let l2 = params.l2_reg;
    let mcw = params.min_child_weight;
    let mut try_split = |gl: f64, hl: f64, default_left: bool| {
        let (gr, hr) = (fr.g - gl, fr.h - hl);
        if hl < mcw || hr < mcw || hl <= 0.0 || hr <= 0.0 {
            return;
        }
        let gain = split_gain(gl, hl, gr, hr, l2, params.split_gain_floor);
        if gain > 0.0 && fr.best.is_none_or(|b| gain > b.gain) {
            fr.best = Some(Candidate { feature, threshold, default_left, gain });
        }
    };
    try_split(gl, hl, false);
    if mh > 0.0 {
        try_split(gl + mg, hl + mh, true);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn params(l2: f64) -> GbtParams {
        GbtParams { l2_reg: l2, learning_rate: 1.0, min_child_weight: 0.0, ..Default::default() }
    }

    #[test]
    fn hand_built_leaf_weights() {
        // y = {2,2,4,4} from a zero start: G = −4 and −8, H = 2 per side
        assert_eq!(leaf_weight(-4.0, 2.0, 1.0), 4.0 / 3.0);
        assert_eq!(leaf_weight(-8.0, 2.0, 1.0), 8.0 / 3.0);
        // ½(16/3 + 64/3 − 144/5) < 0, so the greedy learner keeps the root
        assert!((split_gain(-4.0, 2.0, -8.0, 2.0, 1.0, 0.0) + 16.0 / 15.0).abs() < 1e-12);
        let x = array![[0.0], [0.0], [1.0], [1.0]];
        let g = vec![-2.0, -2.0, -4.0, -4.0];
        let tree = fit_tree(x.view(), &g, &[1.0; 4], &[0, 1, 2, 3], &[0], &GbtParams { max_depth: 1, ..params(1.0) }).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.root().value, 12.0 / 5.0);
    }

    #[test]
    fn profitable_split_gets_regularised_weights() {
        // six rows per side: G = −12 and −24, H = 6
        let x = Array2::from_shape_fn((12, 1), |(i, _)| (i / 6) as f64);
        let g: Vec<f64> = (0..12).map(|i| if i < 6 { -2.0 } else { -4.0 }).collect();
        let rows: Vec<usize> = (0..12).collect();
        let tree = fit_tree(x.view(), &g, &[1.0; 12], &rows, &[0], &GbtParams { max_depth: 1, ..params(1.0) }).unwrap();
        let split = tree.root().split.as_ref().unwrap();
        assert!((tree.nodes[split.left].value - 12.0 / 7.0).abs() < 1e-12);
        assert!((tree.nodes[split.right].value - 24.0 / 7.0).abs() < 1e-12);
        assert_eq!(tree.root().cover, 12.0);
    }

    #[test]
    fn constant_target_gives_single_leaf() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let g = vec![-5.0; 4];
        let h = vec![1.0; 4];
        let tree = fit_tree(x.view(), &g, &h, &[0, 1, 2, 3], &[0], &params(1.0)).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.root().value, 20.0 / 5.0);
    }

    #[test]
    fn all_missing_feature_is_never_selected() {
        let x = array![[f64::NAN, 0.0], [f64::NAN, 0.0], [f64::NAN, 1.0], [f64::NAN, 1.0]];
        let g = vec![-1.0, -1.0, 1.0, 1.0];
        let h = vec![1.0; 4];
        let tree = fit_tree(x.view(), &g, &h, &[0, 1, 2, 3], &[0, 1], &params(0.0)).unwrap();
        assert_eq!(tree.features_used(), vec![1]);
    }

    #[test]
    fn missing_values_pick_the_better_side() {
        // missing rows share the gradient of the high group
        let x = array![[0.0], [0.0], [1.0], [1.0], [f64::NAN], [f64::NAN]];
        let g = vec![1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
        let h = vec![1.0; 6];
        let p = GbtParams { max_depth: 1, ..params(0.0) };
        let tree = fit_tree(x.view(), &g, &h, &[0, 1, 2, 3, 4, 5], &[0], &p).unwrap();
        let s = tree.root().split.as_ref().unwrap();
        assert!(!s.default_left);
        assert_eq!(tree.predict_row(&[f64::NAN]), tree.predict_row(&[1.0]));
    }

    #[test]
    fn missing_only_split() {
        let x = array![[1.0], [1.0], [f64::NAN], [f64::NAN]];
        let g = vec![1.0, 1.0, -1.0, -1.0];
        let h = vec![1.0; 4];
        let tree = fit_tree(x.view(), &g, &h, &[0, 1, 2, 3], &[0], &params(0.0)).unwrap();
        let s = tree.root().split.as_ref().unwrap();
        assert_eq!(s.threshold, f64::MAX);
        assert!(tree.predict_row(&[1.0]) < 0.0);
        assert!(tree.predict_row(&[f64::NAN]) > 0.0);
    }

    #[test]
    fn covers_add_up_and_depth_is_bounded() {
        let n = 200;
        let x = Array2::from_shape_fn((n, 3), |(i, j)| ((i * (j + 3) * 7919) % 101) as f64);
        let g: Vec<f64> = (0..n).map(|i| ((i * 31) % 17) as f64 - 8.0).collect();
        let h = vec![1.0; n];
        let rows: Vec<usize> = (0..n).collect();
        let p = GbtParams { max_depth: 4, ..params(1.0) };
        let tree = fit_tree(x.view(), &g, &h, &rows, &[0, 1, 2], &p).unwrap();
        assert!(tree.depth() <= 4);
        for node in &tree.nodes {
            if let Some(s) = &node.split {
                assert_eq!(node.cover, tree.nodes[s.left].cover + tree.nodes[s.right].cover);
                assert!(s.gain > 0.0);
            }
        }
    }

    #[test]
    fn midpoint_stays_between_adjacent_floats() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo < m && m <= hi);
    }
}
