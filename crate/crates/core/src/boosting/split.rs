use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BoostError;

pub const MIN_ROWS: usize = 50;
pub const TRAIN_SHARE: f64 = 0.64;
pub const VALID_SHARE: f64 = 0.16;

/// Random train/validation/test partition over rows with a present target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Splits the rows whose target is present 64/16/20, deterministically by seed.
/// Indices refer to positions in `targets`; each part is sorted.
pub fn split_dataset(targets: &[Option<f64>], seed: u64) -> Result<DatasetSplit, BoostError> {
    let mut rows: Vec<usize> = targets.iter().enumerate().filter(|(_, t)| t.is_some()).map(|(i, _)| i).collect();
    let n = rows.len();
    if n < MIN_ROWS {
        return Err(BoostError::TooFewRows { rows: n, min: MIN_ROWS });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rows.shuffle(&mut rng);
    let n_train = (TRAIN_SHARE * n as f64).round() as usize;
    let n_valid = (VALID_SHARE * n as f64).round() as usize;
    let mut train = rows[..n_train].to_vec();
    let mut valid = rows[n_train..n_train + n_valid].to_vec();
    let mut test = rows[n_train + n_valid..].to_vec();
    train.sort_unstable();
    valid.sort_unstable();
    test.sort_unstable();
    Ok(DatasetSplit { train, valid, test, seed })
}

/// Assigns each of `n` rows to one of `k` folds after a seeded shuffle.
pub fn kfold_assignments(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut fold = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % k;
    }
    fold
}
