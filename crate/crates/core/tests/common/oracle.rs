//! Subset-enumeration reference implementations, independent of the
//! library's tree recursions.

use freqstab::boosting::{GbtModel, Node, RegressionTree, Split};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random tree with consistent covers and cover-weighted internal values.
pub fn random_tree(rng: &mut ChaCha8Rng, n_features: usize, max_depth: usize) -> RegressionTree {
    fn grow(rng: &mut ChaCha8Rng, nodes: &mut Vec<Node>, m: usize, depth: usize, max_depth: usize) -> usize {
        let idx = nodes.len();
        nodes.push(Node { cover: 0.0, value: 0.0, split: None });
        let leaf = depth >= max_depth || (depth > 0 && rng.random_bool(0.3));
        if leaf {
            nodes[idx].cover = rng.random_range(1..20) as f64;
            nodes[idx].value = rng.random_range(-2.0..2.0);
            return idx;
        }
        let feature = rng.random_range(0..m);
        let threshold = rng.random_range(-1.0..1.0);
        let default_left = rng.random_bool(0.5);
        let left = grow(rng, nodes, m, depth + 1, max_depth);
        let right = grow(rng, nodes, m, depth + 1, max_depth);
        let (cl, cr) = (nodes[left].cover, nodes[right].cover);
        nodes[idx].cover = cl + cr;
        nodes[idx].value = (cl * nodes[left].value + cr * nodes[right].value) / (cl + cr);
        nodes[idx].split = Some(Split { feature, threshold, default_left, left, right, gain: 1.0 });
        idx
    }
    let mut nodes = Vec::new();
    grow(rng, &mut nodes, n_features, 0, max_depth);
    RegressionTree { nodes }
}

pub fn random_ensemble(seed: u64, n_features: usize, n_trees: usize, max_depth: usize) -> GbtModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = GbtModel::constant(rng.random_range(-1.0..1.0), (0..n_features).map(|i| format!("x{i}")).collect());
    model.trees = (0..n_trees).map(|_| random_tree(&mut rng, n_features, max_depth)).collect();
    model
}

/// Uniform rows on [−1.2, 1.2] with a share of NaN entries.
pub fn random_rows(seed: u64, n: usize, m: usize, missing: f64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, m), |_| if rng.random_bool(missing) { f64::NAN } else { rng.random_range(-1.2..1.2) })
}

fn route(split: &Split, v: f64) -> usize {
    let left = if v.is_nan() { split.default_left } else { v < split.threshold };
    if left {
        split.left
    } else {
        split.right
    }
}

/// `E[tree(x) | x_S]` with features outside `S` integrated by cover.
fn cover_expectation(tree: &RegressionTree, idx: usize, x: &[f64], mask: u32) -> f64 {
    let node = &tree.nodes[idx];
    match &node.split {
        None => node.value,
        Some(s) if mask & (1 << s.feature) != 0 => cover_expectation(tree, route(s, x[s.feature]), x, mask),
        Some(s) => {
            let (l, r) = (&tree.nodes[s.left], &tree.nodes[s.right]);
            (l.cover * cover_expectation(tree, s.left, x, mask) + r.cover * cover_expectation(tree, s.right, x, mask)) / node.cover
        }
    }
}

pub fn path_value(model: &GbtModel, x: &[f64], mask: u32) -> f64 {
    model.base_score + model.trees.iter().map(|t| cover_expectation(t, 0, x, mask)).sum::<f64>()
}

pub fn interventional_value(model: &GbtModel, x: &[f64], background: &Array2<f64>, mask: u32) -> f64 {
    let mut hybrid = vec![0.0; x.len()];
    let mut total = 0.0;
    for z in background.rows() {
        for j in 0..x.len() {
            hybrid[j] = if mask & (1 << j) != 0 { x[j] } else { z[j] };
        }
        total += model.predict_row(&hybrid);
    }
    total / background.nrows() as f64
}

fn factorials(n: usize) -> Vec<f64> {
    let mut f = vec![1.0; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// Shapley values of the game `v` over `n` players by subset enumeration.
pub fn shapley(n: usize, v: impl Fn(u32) -> f64) -> Vec<f64> {
    let table: Vec<f64> = (0..1u32 << n).map(&v).collect();
    let f = factorials(n);
    let mut phi = vec![0.0; n];
    for (i, p) in phi.iter_mut().enumerate() {
        for s in 0..1u32 << n {
            if s & (1 << i) != 0 {
                continue;
            }
            let k = s.count_ones() as usize;
            *p += f[k] * f[n - k - 1] / f[n] * (table[(s | 1 << i) as usize] - table[s as usize]);
        }
    }
    phi
}

/// Shapley interaction index with the pair effect split evenly between
/// `(i, j)` and `(j, i)`; the diagonal holds `φ_i − Σ_{j≠i} Φ_ij`.
pub fn shapley_interactions(n: usize, v: impl Fn(u32) -> f64) -> Array2<f64> {
    let table: Vec<f64> = (0..1u32 << n).map(&v).collect();
    let f = factorials(n);
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut acc = 0.0;
            for s in 0..1u32 << n {
                if s & (1 << i) != 0 || s & (1 << j) != 0 {
                    continue;
                }
                let k = s.count_ones() as usize;
                let delta = table[(s | 1 << i | 1 << j) as usize] - table[(s | 1 << i) as usize] - table[(s | 1 << j) as usize] + table[s as usize];
                acc += f[k] * f[n - k - 2] / (2.0 * f[n - 1]) * delta;
            }
            out[[i, j]] = acc;
        }
    }
    let phi = shapley(n, v);
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| out[[i, j]]).sum();
        out[[i, i]] = phi[i] - off;
    }
    out
}
