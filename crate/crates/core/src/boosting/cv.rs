use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{train_gbt, Dataset};
use super::split::kfold_assignments;
use super::{BoostError, GbtParams, ParamGrid};
use crate::analysis::r2_score;

/// Mean held-out R² of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub params: GbtParams,
    pub fold_r2: Vec<f64>,
    pub mean_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub best: GbtParams,
    pub table: Vec<GridScore>,
}

/// k-fold grid search on the training set. Each fold's held-out part also
/// serves as that fit's early-stopping set. Ties go to the earlier grid point.
pub fn grid_search_cv(train: &Dataset, grid: &ParamGrid, k: usize, seed: u64) -> Result<CvOutcome, BoostError> {
    let points = grid.points();
    if points.is_empty() {
        return Err(BoostError::EmptyGrid);
    }
    if k < 2 || train.len() < k {
        return Err(BoostError::TooFewRows { rows: train.len(), min: k.max(2) });
    }
    let fold_of = kfold_assignments(train.len(), k, seed);
    let folds: Vec<(Dataset, Dataset)> = (0..k)
        .map(|f| {
            let fit: Vec<usize> = (0..train.len()).filter(|&i| fold_of[i] != f).collect();
            let held: Vec<usize> = (0..train.len()).filter(|&i| fold_of[i] == f).collect();
            (train.subset(&fit), train.subset(&held))
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..k).map(move |f| (p, f))).collect();
    let results: Vec<Result<f64, BoostError>> = jobs
        .par_iter()
        .map(|&(p, f)| {
            let (fit, held) = &folds[f];
            let model = train_gbt(fit, Some(held), &points[p])?;
            let pred = model.predict(held.x.view())?;
            Ok(r2_score(&held.y, &pred)?)
        })
        .collect();

    let mut table = Vec::with_capacity(points.len());
    let mut iter = results.into_iter();
    for params in &points {
        let fold_r2 = (0..k).map(|_| iter.next().expect("one result per job")).collect::<Result<Vec<_>, _>>()?;
        let mean_r2 = fold_r2.iter().sum::<f64>() / k as f64;
        table.push(GridScore { params: params.clone(), fold_r2, mean_r2 });
    }
    let mut best = 0;
    for (i, row) in table.iter().enumerate() {
        if row.mean_r2 > table[best].mean_r2 {
            best = i;
        }
    }
    Ok(CvOutcome { best: table[best].params.clone(), table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(n: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = Array2::from_shape_fn((n, 2), |_| rng.random_range(0.0..1.0));
        let y = x.rows().into_iter().map(|r| r[0] * 2.0 + rng.random_range(-0.1..0.1)).collect();
        Dataset::new(vec!["a".into(), "b".into()], x, y).unwrap()
    }

    #[test]
    fn single_point_grid_returns_it() {
        let p = GbtParams { max_rounds: 20, max_depth: 2, ..Default::default() };
        let out = grid_search_cv(&data(120), &ParamGrid::single(p.clone()), 5, 0).unwrap();
        assert_eq!(out.best, p);
        assert_eq!(out.table.len(), 1);
        assert_eq!(out.table[0].fold_r2.len(), 5);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let grid = ParamGrid { max_depth: vec![], ..Default::default() };
        assert!(matches!(grid_search_cv(&data(60), &grid, 5, 0), Err(BoostError::EmptyGrid)));
    }

    #[test]
    fn same_seed_same_winner() {
        let grid = ParamGrid {
            max_depth: vec![1, 3],
            learning_rate: vec![0.3],
            min_child_weight: vec![1.0],
            subsample: vec![0.8],
            l2_reg: vec![1.0],
            base: GbtParams { max_rounds: 30, ..Default::default() },
        };
        let d = data(150);
        let a = grid_search_cv(&d, &grid, 5, 3).unwrap();
        let b = grid_search_cv(&d, &grid, 5, 3).unwrap();
        assert_eq!(a, b);
    }
}
