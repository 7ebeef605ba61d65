//! Ground-truth recovery on the synthetic scenarios through the library
//! pipeline.

use std::collections::BTreeMap;

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqstab::analysis::{relative_ramp_speeds, PerformanceReport, RocofRole, RoleThresholds, ScenarioPredictions, TechnologySeries};
use freqstab::boosting::{train_gbt, Dataset, GbtParams};
use freqstab::explain::{interventional_shap, mean_abs_importance, shap_feature_direction};
use freqstab::ingest::{generate_synthetic_area, AggregationPolicy, Availability, EngineerOptions, Scenario, SynthOptions, SyntheticArea};
use freqstab::pipeline::{
    explain_rows, prepare_features, profile_predictions, quick_training, target_data, train_on_split, train_protocol, ExplainRows, PreparedFeatures,
    Scope, Seeds, TargetData,
};
use freqstab::signal::{extract_indicators, ExtractOptions, IndicatorTable};

struct Prepared {
    area: SyntheticArea,
    features: PreparedFeatures,
    indicators: IndicatorTable,
}

fn prepare(scenario: Scenario, days: usize) -> Prepared {
    let area = generate_synthetic_area(&SynthOptions { seed: 17, n_days: days, scenario, ..Default::default() });
    let indicators = extract_indicators(&area.trace, scenario.area().rocof_params(), ExtractOptions::default()).unwrap();
    let features = prepare_features(&area.raw, &AggregationPolicy::default(), &EngineerOptions::default()).unwrap();
    Prepared { area, features, indicators }
}

fn data(p: &Prepared, scope: Scope) -> TargetData {
    target_data(&p.features.frame, &p.indicators, p.area.truth.target, scope).unwrap()
}

fn performance(p: &Prepared, full: &TargetData, day_ahead: &TargetData) -> freqstab::analysis::PerformanceRow {
    let seeds = Seeds::default();
    let training = quick_training();
    let a = train_protocol(full, &training, &seeds).unwrap();
    let b = train_on_split(day_ahead, a.split.clone(), &training, &seeds).unwrap();
    let scenario = ScenarioPredictions {
        area: p.area.truth.scenario.as_str().into(),
        indicator: p.area.truth.target.as_str().into(),
        n_train: a.split.train.len(),
        y_test: a.split.test.iter().map(|&r| full.dataset.y[r]).collect(),
        full: a.test_predictions.clone(),
        day_ahead: b.test_predictions.clone(),
        profile: profile_predictions(full, &a.split).unwrap(),
    };
    PerformanceReport::build(&[scenario]).unwrap().rows.remove(0)
}

#[test]
fn nordic_forecast_errors_lift_the_full_model_over_day_ahead() {
    let p = prepare(Scenario::NordicLike, 60);
    let row = performance(&p, &data(&p, Scope::Full), &data(&p, Scope::DayAhead));
    let gain = row.gain_full_over_day_ahead.unwrap();
    assert!(gain > 1.5, "{row:?}");
    assert!(row.gain_full_over_profile.unwrap() > 2.0, "{row:?}");
}

#[test]
fn identical_feature_sets_give_unit_gain() {
    let p = prepare(Scenario::NordicLike, 12);
    let full = data(&p, Scope::Full);
    // relabelling every column as day-ahead makes both scopes the same model
    let mut frame = p.features.frame.clone();
    for c in &mut frame.columns {
        c.availability = Availability::DayAhead;
    }
    let day_ahead = target_data(&frame, &p.indicators, p.area.truth.target, Scope::DayAhead).unwrap();
    assert_eq!(day_ahead.dataset.feature_names, full.dataset.feature_names);
    let row = performance(&p, &full, &day_ahead);
    assert_eq!(row.gain_full_over_day_ahead, Some(1.0));
}

#[test]
fn gb_solar_ramp_is_the_leading_driver() {
    let p = prepare(Scenario::GbLike, 60);
    let full = data(&p, Scope::Full);
    let seeds = Seeds::default();
    let out = train_protocol(&full, &quick_training(), &seeds).unwrap();
    let rows = ExplainRows::All.select(&out.split, full.dataset.len());
    let shap = explain_rows(&out.model, &full, &rows, &out.split, 100, seeds.background).unwrap();
    assert!(shap.max_additivity_error() <= 1e-8);
    let ranking = mean_abs_importance(&shap);
    assert_eq!(ranking[0].feature, p.area.truth.driver);
    // larger solar ramps lower the Nadir
    assert!(shap_feature_direction(&shap, &p.area.truth.driver).unwrap() < 0.0);
}

#[test]
fn slow_technology_with_negative_effect_is_offsetting() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 3000;
    // target rises with gas ramps and falls with nuclear ramps
    let x = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1000.0..1000.0));
    let y: Vec<f64> = x.rows().into_iter().map(|r| 1e-5 * r[0] - 1e-5 * r[1] + 1e-4 * rng.random_range(-1.0..1.0)).collect();
    let names = vec!["Gas ramp".to_string(), "Nuclear ramp".to_string()];
    let d = Dataset::new(names, x, y).unwrap();
    let model = train_gbt(&d, None, &GbtParams { max_depth: 3, max_rounds: 150, ..Default::default() }).unwrap();
    let bg = d.x.select(Axis(0), &(0..100).collect::<Vec<_>>());
    let shap = interventional_shap(&model, d.x.view(), bg.view()).unwrap();
    let rho_gas = shap_feature_direction(&shap, "Gas ramp").unwrap();
    let rho_nuclear = shap_feature_direction(&shap, "Nuclear ramp").unwrap();
    assert!(rho_gas > 0.9 && rho_nuclear < -0.9, "{rho_gas} {rho_nuclear}");

    let swing = |step: f64| (0..200).map(|i| Some(if i % 2 == 0 { 0.0 } else { step })).collect();
    let mut table = relative_ramp_speeds(&[
        TechnologySeries { name: "Gas".into(), generation: swing(900.0), ramp_rate: 0.08 },
        TechnologySeries { name: "Nuclear".into(), generation: swing(300.0), ramp_rate: 0.02 },
    ])
    .unwrap();
    let directions: BTreeMap<String, f64> = [("Gas".to_string(), rho_gas), ("Nuclear".to_string(), rho_nuclear)].into();
    table.classify(&directions, &RoleThresholds::default());
    assert_eq!(table.get("Gas").unwrap().role, Some(RocofRole::Driving));
    assert_eq!(table.get("Nuclear").unwrap().role, Some(RocofRole::Offsetting));
}
