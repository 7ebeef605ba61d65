//! Full pipeline on a synthetic area with known ground truth: indicators,
//! features, the training protocol, SHAP and the recovered structure.
//!
//! `cargo run --release --example end_to_end -- [ce_like|nordic_like|gb_like] [days]`

use ndarray::Axis;

use freqstab::analysis::r2_score;
use freqstab::explain::{dependency_data, locate_step, mean_abs_importance, shap_interactions};
use freqstab::ingest::{generate_synthetic_area, AggregationPolicy, EngineerOptions, Scenario, SynthOptions};
use freqstab::pipeline::{explain_rows, prepare_features, profile_predictions, quick_training, target_data, train_on_split, train_protocol, ExplainRows, Scope, Seeds};
use freqstab::signal::{extract_indicators, ExtractOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenario = match args.next() {
        Some(s) => Scenario::parse(&s).ok_or(format!("unknown scenario {s:?}"))?,
        None => Scenario::CeLike,
    };
    let days: usize = args.next().map(|d| d.parse()).transpose()?.unwrap_or(60);

    let area = generate_synthetic_area(&SynthOptions { seed: 11, n_days: days, scenario, ..Default::default() });
    let truth = &area.truth;
    let indicators = extract_indicators(&area.trace, scenario.area().rocof_params(), ExtractOptions::default())?;
    let prepared = prepare_features(&area.raw, &AggregationPolicy::default(), &EngineerOptions::default())?;
    println!("{} hours, {} feature columns, dropped {:?}", indicators.len(), prepared.frame.columns.len(), prepared.dropped.iter().map(|d| &d.0).collect::<Vec<_>>());

    let seeds = Seeds::default();
    let training = quick_training();
    let full = target_data(&prepared.frame, &indicators, truth.target, Scope::Full)?;
    let day_ahead = target_data(&prepared.frame, &indicators, truth.target, Scope::DayAhead)?;
    let out = train_protocol(&full, &training, &seeds)?;
    let out_da = train_on_split(&day_ahead, out.split.clone(), &training, &seeds)?;
    let y_test: Vec<f64> = out.split.test.iter().map(|&r| full.dataset.y[r]).collect();
    let profile_r2 = r2_score(&y_test, &profile_predictions(&full, &out.split)?)?;
    println!("{} test R²: full {:.3}, day-ahead {:.3}, daily profile {profile_r2:.3}", truth.target.as_str(), out.test_r2, out_da.test_r2);

    let rows = ExplainRows::All.select(&out.split, full.dataset.len());
    let shap = explain_rows(&out.model, &full, &rows, &out.split, 100, seeds.background)?;
    println!("top features (true driver {:?}):", truth.driver);
    for f in mean_abs_importance(&shap).iter().take(5) {
        println!("  {:<28} {:.5}", f.feature, f.mean_abs_shap);
    }

    if let Some(threshold) = truth.step_threshold {
        let dep = dependency_data(&shap, &truth.driver, &truth.driver)?;
        let (x, y): (Vec<f64>, Vec<f64>) = dep.x.iter().zip(&dep.shap).filter(|(x, _)| x.is_finite()).map(|(a, b)| (*a, *b)).unzip();
        if let Some(step) = locate_step(&x, &y, (x.len() / 20).max(5)) {
            println!("step located at {:.0} (planted {threshold:.0}), jump {:.4}", step.threshold, step.jump);
        }
    }
    if let Some((a, b)) = &truth.interaction {
        let sample: Vec<usize> = rows.iter().copied().take(1000).collect();
        let inter = shap_interactions(&out.model, full.dataset.x.select(Axis(0), &sample).view())?;
        if let Some((j, k, _)) = inter.strongest_pair() {
            println!("strongest interaction {} x {} (planted {a} x {b})", inter.feature_names[j], inter.feature_names[k]);
        }
    }
    Ok(())
}
