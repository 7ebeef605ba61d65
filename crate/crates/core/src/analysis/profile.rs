use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Per-hour-of-day mean of a training target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyProfilePredictor {
    pub means: [f64; 24],
    pub counts: [usize; 24],
}

impl DailyProfilePredictor {
    /// Every hour 0..24 must appear at least once.
    pub fn fit(hours: &[u32], targets: &[f64]) -> Result<Self, AnalysisError> {
        if hours.len() != targets.len() {
            return Err(AnalysisError::LengthMismatch { left: hours.len(), right: targets.len() });
        }
        let mut sums = [0.0; 24];
        let mut counts = [0usize; 24];
        for (&h, &y) in hours.iter().zip(targets) {
            if h >= 24 {
                return Err(AnalysisError::InvalidHour(h));
            }
            sums[h as usize] += y;
            counts[h as usize] += 1;
        }
        let mut means = [0.0; 24];
        for h in 0..24 {
            if counts[h] == 0 {
                return Err(AnalysisError::MissingHourBin(h as u32));
            }
            means[h] = sums[h] / counts[h] as f64;
        }
        Ok(Self { means, counts })
    }

    pub fn predict(&self, hours: &[u32]) -> Result<Vec<f64>, AnalysisError> {
        hours.iter().map(|&h| self.means.get(h as usize).copied().ok_or(AnalysisError::InvalidHour(h))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::r2_score;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    fn hours(n: usize) -> Vec<u32> {
        (0..n).map(|i| (i % 24) as u32).collect()
    }

    #[test]
    fn constant_target_gives_flat_profile() {
        let h = hours(96);
        let p = DailyProfilePredictor::fit(&h, &vec![2.5; 96]).unwrap();
        assert!(p.means.iter().all(|&m| m == 2.5));
        let test_y: Vec<f64> = (0..48).map(|i| 2.5 + (i as f64).sin()).collect();
        let pred = p.predict(&hours(48)).unwrap();
        let mean = test_y.iter().sum::<f64>() / 48.0;
        // SSE = SST + n·(mean − c)²
        let sst: f64 = test_y.iter().map(|y| (y - mean).powi(2)).sum();
        let expected = -(mean - 2.5f64).powi(2) * 48.0 / sst;
        assert!((r2_score(&test_y, &pred).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn pure_hour_function_is_recovered() {
        let f = |h: u32| (h as f64 * 0.3).cos() * 4.0;
        let h = hours(24 * 10);
        let y: Vec<f64> = h.iter().map(|&h| f(h)).collect();
        let p = DailyProfilePredictor::fit(&h, &y).unwrap();
        let th = hours(24 * 3);
        let ty: Vec<f64> = th.iter().map(|&h| f(h)).collect();
        assert!((r2_score(&ty, &p.predict(&th).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sinusoid_plus_noise_matches_signal_share() {
        // signal variance A²/2 = 2, noise variance 1 → share 2/3
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut gen = |n: usize| {
            let h = hours(n);
            let y: Vec<f64> = h.iter().map(|&h| 2.0 * (2.0 * PI * h as f64 / 24.0).sin() + noise.sample(&mut rng)).collect();
            (h, y)
        };
        let (h, y) = gen(24 * 2000);
        let p = DailyProfilePredictor::fit(&h, &y).unwrap();
        let (th, ty) = gen(24 * 2000);
        let r2 = r2_score(&ty, &p.predict(&th).unwrap()).unwrap();
        assert!((r2 - 2.0 / 3.0).abs() < 0.01, "{r2}");
    }

    #[test]
    fn missing_bin_is_reported() {
        let h: Vec<u32> = (0..23).collect();
        assert!(matches!(DailyProfilePredictor::fit(&h, &vec![0.0; 23]), Err(AnalysisError::MissingHourBin(23))));
    }

    #[test]
    fn in_sample_r2_is_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = hours(24 * 5);
        let y: Vec<f64> = (0..h.len()).map(|_| rng.random_range(-3.0..3.0)).collect();
        let p = DailyProfilePredictor::fit(&h, &y).unwrap();
        assert!(r2_score(&y, &p.predict(&h).unwrap()).unwrap() >= 0.0);
    }
}
