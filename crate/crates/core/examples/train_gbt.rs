//! Grid search, early stopping and held-out scoring of a boosted model.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqstab::analysis::r2_score;
use freqstab::boosting::{grid_search_cv, split_dataset, train_gbt, Dataset, GbtModel, GbtParams, ParamGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let n = 2000;
    let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(-1.0..1.0));
    let y: Vec<f64> = x.rows().into_iter().map(|r| 2.0 * r[0] + if r[1] > 0.3 { 1.0 } else { 0.0 } * r[2] + 0.1 * rng.random_range(-1.0..1.0)).collect();
    let data = Dataset::new(vec!["a".into(), "b".into(), "c".into(), "noise".into()], x, y)?;

    let split = split_dataset(&data.y.iter().map(|&v| Some(v)).collect::<Vec<_>>(), 42)?;
    let (train, valid, test) = (data.subset(&split.train), data.subset(&split.valid), data.subset(&split.test));

    let grid = ParamGrid {
        max_depth: vec![2, 4],
        learning_rate: vec![0.1, 0.3],
        min_child_weight: vec![1.0],
        subsample: vec![0.8],
        l2_reg: vec![1.0],
        base: GbtParams { max_rounds: 300, ..Default::default() },
    };
    let cv = grid_search_cv(&train, &grid, 5, 7)?;
    for row in &cv.table {
        println!("depth {} lr {} -> mean CV R² {:.3}", row.params.max_depth, row.params.learning_rate, row.mean_r2);
    }

    let model = train_gbt(&train, Some(&valid), &cv.best)?;
    let r2 = r2_score(&test.y, &model.predict(test.x.view())?)?;
    println!("best depth {}, {} trees kept of {} run, test R² {r2:.3}", cv.best.max_depth, model.meta.rounds_used, model.meta.rounds_run);

    let restored = GbtModel::from_json(&model.to_json()?)?;
    assert_eq!(restored.predict(test.x.view())?, model.predict(test.x.view())?);
    Ok(())
}
