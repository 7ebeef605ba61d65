use super::AnalysisError;

/// Coefficient of determination `1 - SSE/SST`.
pub fn r2_score(y_true: &[f64], y_pred: &[f64]) -> Result<f64, AnalysisError> {
    if y_true.len() != y_pred.len() {
        return Err(AnalysisError::LengthMismatch { left: y_true.len(), right: y_pred.len() });
    }
    if y_true.len() < 2 {
        return Err(AnalysisError::TooFewSamples { got: y_true.len(), min: 2 });
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let sst: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    if sst <= 0.0 {
        return Err(AnalysisError::ZeroVariance);
    }
    let sse: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - sse / sst)
}

/// Pearson correlation over pairs where both entries are present.
/// `None` when fewer than `min_pairs` pairs remain or either side is constant.
pub fn pearson(a: &[Option<f64>], b: &[Option<f64>], min_pairs: usize) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).collect();
    pearson_pairs(&pairs, min_pairs)
}

pub(crate) fn pearson_pairs(pairs: &[(f64, f64)], min_pairs: usize) -> Option<f64> {
    if pairs.len() < min_pairs.max(2) {
        return None;
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |acc, (x, y)| (acc.0 + x, acc.1 + y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_and_mean_predictions() {
        let y = [1.0, 4.0, 2.0, 8.0];
        assert_eq!(r2_score(&y, &y).unwrap(), 1.0);
        let mean = [3.75; 4];
        assert_eq!(r2_score(&y, &mean).unwrap(), 0.0);
    }

    #[test]
    fn anti_correlated_three_points() {
        // SST = 2, SSE = (1-3)² + 0 + (3-1)² = 8
        let r2 = r2_score(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert!((r2 - (1.0 - 8.0 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn guards() {
        assert!(matches!(r2_score(&[1.0, 1.0], &[1.0, 2.0]), Err(AnalysisError::ZeroVariance)));
        assert!(matches!(r2_score(&[1.0], &[1.0]), Err(AnalysisError::TooFewSamples { .. })));
        assert!(matches!(r2_score(&[1.0, 2.0], &[1.0]), Err(AnalysisError::LengthMismatch { .. })));
    }

    #[test]
    fn pearson_basics() {
        let x: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        let neg: Vec<Option<f64>> = x.iter().map(|v| v.map(|v| -v)).collect();
        assert!((pearson(&x, &x, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &neg, 3).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&x, &vec![Some(1.0); 10], 3).is_none());
        assert!(pearson(&x[..2], &x[..2], 3).is_none());
    }

    proptest! {
        #[test]
        fn r2_is_invariant_under_affine_rescaling(
            ys in prop::collection::vec(-100.0f64..100.0, 3..40),
            noise in prop::collection::vec(-5.0f64..5.0, 40),
            scale in 0.01f64..100.0,
            shift in -1e3f64..1e3,
        ) {
            let pred: Vec<f64> = ys.iter().zip(&noise).map(|(y, e)| y + e).collect();
            let r = r2_score(&ys, &pred);
            prop_assume!(r.is_ok());
            let ys2: Vec<f64> = ys.iter().map(|y| scale * y + shift).collect();
            let pred2: Vec<f64> = pred.iter().map(|y| scale * y + shift).collect();
            let r2 = r2_score(&ys2, &pred2).unwrap();
            prop_assert!((r.unwrap() - r2).abs() < 1e-9);
        }
    }
}
