use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqstab::ingest::{generate_synthetic_area, Scenario, SynthOptions};
use freqstab::signal::{
    estimate_derivative, extract_indicators, nadir_occurrence_histogram, Area, ExtractOptions, FrequencyTrace, IndicatorTable, RocofParams,
};

const HOUR: usize = 3600;

fn start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2020, 3, 2, 0, 0, 0).unwrap()
}

/// Bounded random walk with occasional jumps, well inside ±2 Hz.
fn walk(seed: u64, hours: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = 0.0f64;
    (0..hours * HOUR + 1)
        .map(|_| {
            f = 0.999 * f + rng.random_range(-0.002..0.002);
            if rng.random_bool(0.0005) {
                f += rng.random_range(-0.1..0.1);
            }
            f.clamp(-0.5, 0.5)
        })
        .collect()
}

fn table(values: Vec<f64>, params: RocofParams) -> IndicatorTable {
    let trace = FrequencyTrace::from_centered(start(), values).unwrap();
    extract_indicators(&trace, params, ExtractOptions::default()).unwrap()
}

fn params(nordic: bool) -> RocofParams {
    if nordic {
        Area::Nordic.rocof_params()
    } else {
        Area::ContinentalEurope.rocof_params()
    }
}

fn map(col: &[Option<f64>], f: impl Fn(f64) -> f64) -> Vec<Option<f64>> {
    col.iter().map(|v| v.map(&f)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_of_two_scaling_is_exact(seed in any::<u64>(), k in -3i32..4, negative in any::<bool>(), nordic in any::<bool>()) {
        let c = if negative { -(2f64.powi(k)) } else { 2f64.powi(k) };
        let f = walk(seed, 3).iter().map(|v| v / 8.0).collect::<Vec<_>>();
        let a = table(f.clone(), params(nordic));
        let b = table(f.iter().map(|v| c * v).collect(), params(nordic));
        prop_assert_eq!(map(&a.nadir, |v| c * v), b.nadir);
        prop_assert_eq!(map(&a.integral, |v| c * v), b.integral);
        prop_assert_eq!(map(&a.rocof, |v| c * v), b.rocof);
        prop_assert_eq!(map(&a.msd, |v| c * c * v), b.msd);
    }

    #[test]
    fn general_scaling_is_proportional(seed in any::<u64>(), c in 0.1f64..3.0) {
        let f = walk(seed, 2).iter().map(|v| v / 2.0).collect::<Vec<_>>();
        let a = table(f.clone(), params(false));
        let b = table(f.iter().map(|v| c * v).collect(), params(false));
        for h in 0..a.len() {
            let rel = |x: Option<f64>, y: Option<f64>, p: i32| match (x, y) {
                (Some(x), Some(y)) => (c.powi(p) * x - y).abs() <= 1e-12 * (1.0 + y.abs()),
                (None, None) => true,
                _ => false,
            };
            prop_assert!(rel(a.nadir[h], b.nadir[h], 1));
            prop_assert!(rel(a.integral[h], b.integral[h], 1));
            prop_assert!(rel(a.rocof[h], b.rocof[h], 1));
            prop_assert!(rel(a.msd[h], b.msd[h], 2));
        }
    }

    #[test]
    fn negation_flips_signed_indicators(seed in any::<u64>(), nordic in any::<bool>()) {
        let f = walk(seed, 3);
        let a = table(f.clone(), params(nordic));
        let b = table(f.iter().map(|v| -v).collect(), params(nordic));
        prop_assert_eq!(map(&a.nadir, |v| -v), b.nadir);
        prop_assert_eq!(map(&a.integral, |v| -v), b.integral);
        prop_assert_eq!(map(&a.rocof, |v| -v), b.rocof);
        prop_assert_eq!(a.msd, b.msd);
    }

    #[test]
    fn shifting_by_whole_hours_drops_leading_rows(seed in any::<u64>(), shift in 1usize..3) {
        let f = walk(seed, 4);
        let a = table(f.clone(), params(false));
        let b = table(f[shift * HOUR..].to_vec(), params(false));
        prop_assert_eq!(b.len(), a.len() - shift);
        prop_assert_eq!(&a.nadir[shift..], &b.nadir[..]);
        prop_assert_eq!(&a.integral[shift..], &b.integral[..]);
        prop_assert_eq!(&a.msd[shift..], &b.msd[..]);
        // the new first hour lacks the preceding half window
        prop_assert!(b.rocof[0].is_none());
        prop_assert_eq!(&a.rocof[shift + 1..], &b.rocof[1..]);
    }

    #[test]
    fn derivative_preserves_affine_signals(a in -0.5f64..0.5, s in -1e-4f64..1e-4, l in 1usize..120) {
        let n = 2 * HOUR + 1;
        let trace = FrequencyTrace::from_centered(start(), (0..n).map(|t| a + s * t as f64).collect()).unwrap();
        let d = estimate_derivative(&trace, l);
        let valid: Vec<f64> = d.iter().flatten().copied().collect();
        prop_assert_eq!(valid.len(), n - l);
        for v in valid {
            prop_assert!((v - s).abs() <= 1e-12, "{} vs {}", v, s);
        }
    }

    #[test]
    fn hourly_bounds_hold(seed in any::<u64>()) {
        let f = walk(seed, 3);
        let t = table(f.clone(), params(false));
        for h in 0..t.len() {
            let window = &f[h * HOUR..=h * HOUR + HOUR];
            let peak = window.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let msd = t.msd[h].unwrap();
            let integral = t.integral[h].unwrap();
            prop_assert!(msd >= 0.0);
            prop_assert_eq!(t.nadir[h].unwrap().abs(), peak);
            // the sum runs over 3601 samples
            prop_assert!(integral.abs() <= 3601.0 * peak + 1e-12);
            // mean square dominates the squared mean on the same samples
            let mean_sq = msd * 3600.0 / 3601.0;
            let mean = integral / 3601.0;
            prop_assert!(mean_sq + 1e-15 >= mean * mean);
        }
    }

    #[test]
    fn a_missing_sample_poisons_exactly_its_rows(seed in any::<u64>(), at in 0usize..3 * HOUR) {
        let mut f = walk(seed, 3);
        f[at] = f64::NAN;
        let trace = FrequencyTrace::from_centered(start(), f).unwrap();
        let t = extract_indicators(&trace, params(false), ExtractOptions::default()).unwrap();
        for h in 0..3 {
            let inside = at >= h * HOUR && at <= h * HOUR + HOUR;
            prop_assert_eq!(t.nadir[h].is_none(), inside);
            prop_assert_eq!(t.msd[h].is_none(), inside);
            prop_assert_eq!(t.integral[h].is_none(), inside);
        }
    }
}

#[test]
fn uniform_peak_minutes_give_a_flat_histogram() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let hours = 1200;
    let mut f = vec![0.0; hours * HOUR + 1];
    for h in 0..hours {
        // interior samples only, so the shared boundary sample stays zero
        let at = rng.random_range(1..HOUR);
        f[h * HOUR + at] = 0.1;
    }
    let hist = nadir_occurrence_histogram(&FrequencyTrace::from_centered(start(), f).unwrap()).unwrap();
    assert_eq!(hist.hours_used, hours as u64);
    let expected = hours as f64 / 60.0;
    let chi2: f64 = hist.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99.9th percentile of χ² with 59 degrees of freedom is about 98.3
    assert!(chi2 < 98.3, "χ² = {chi2}");
}

#[test]
fn ce_like_peaks_fall_in_the_first_minutes() {
    let area = generate_synthetic_area(&SynthOptions { seed: 2, n_days: 10, scenario: Scenario::CeLike, ..Default::default() });
    let hist = nadir_occurrence_histogram(&area.trace).unwrap();
    assert!(hist.share_before_minute(5) >= 0.5, "{:?}", hist.counts);
}
