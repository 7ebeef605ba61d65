use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::pearson;

/// Minimum pairwise-complete observations for a defined coefficient.
pub const MIN_PAIRS: usize = 3;

/// Pearson coefficients between named row and column series; `None` where
/// undefined (too few pairs or a constant side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationTable {
    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.row_names.iter().position(|n| n == row)?;
        let c = self.col_names.iter().position(|n| n == col)?;
        self.values[r][c]
    }
}

/// Symmetric matrix over `columns`; the diagonal is 1 wherever defined.
pub fn pearson_matrix(names: &[String], columns: &[Vec<Option<f64>>]) -> CorrelationTable {
    let n = columns.len();
    let upper: Vec<Vec<Option<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| pearson(&columns[i], &columns[j], MIN_PAIRS).map(|r| if i == j { 1.0 } else { r })).collect())
        .collect();
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        for (off, v) in upper[i].iter().enumerate() {
            values[i][i + off] = *v;
            values[i + off][i] = *v;
        }
    }
    CorrelationTable { row_names: names.to_vec(), col_names: names.to_vec(), values }
}

/// Features (rows) against targets (columns).
pub fn cross_correlation(
    feature_names: &[String],
    features: &[Vec<Option<f64>>],
    target_names: &[String],
    targets: &[Vec<Option<f64>>],
) -> CorrelationTable {
    let values = features
        .par_iter()
        .map(|f| targets.iter().map(|t| pearson(f, t, MIN_PAIRS)).collect())
        .collect();
    CorrelationTable { row_names: feature_names.to_vec(), col_names: target_names.to_vec(), values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_negation_and_constant() {
        let x: Vec<Option<f64>> = (0..20).map(|i| Some((i as f64).sqrt())).collect();
        let y: Vec<Option<f64>> = x.iter().map(|v| v.map(|v| -v)).collect();
        let c = vec![Some(3.0); 20];
        let names = vec!["x".to_string(), "y".to_string(), "c".to_string()];
        let m = pearson_matrix(&names, &[x, y, c]);
        assert_eq!(m.get("x", "x"), Some(1.0));
        assert!((m.get("x", "y").unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(m.get("c", "c"), None);
        assert_eq!(m.get("x", "c"), None);
    }

    #[test]
    fn cross_table_shape() {
        let f = vec![vec![Some(1.0), Some(2.0), Some(3.0)], vec![Some(1.0), None, Some(3.0)]];
        let t = vec![vec![Some(2.0), Some(4.0), Some(7.0)]];
        let tab = cross_correlation(&["a".into(), "b".into()], &f, &["y".into()], &t);
        assert!(tab.values[0][0].unwrap() > 0.9);
        assert_eq!(tab.values[1][0], None);
    }

    proptest! {
        #[test]
        fn symmetric_with_unit_diagonal(
            cols in prop::collection::vec(prop::collection::vec(prop::option::weighted(0.8, -10.0f64..10.0), 12), 1..6)
        ) {
            let names: Vec<String> = (0..cols.len()).map(|i| format!("c{i}")).collect();
            let m = pearson_matrix(&names, &cols);
            for i in 0..cols.len() {
                if let Some(d) = m.values[i][i] { prop_assert_eq!(d, 1.0); }
                for j in 0..cols.len() {
                    prop_assert_eq!(m.values[i][j], m.values[j][i]);
                }
            }
        }
    }
}
