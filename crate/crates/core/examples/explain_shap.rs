//! Interventional and path-dependent SHAP values, interactions and the
//! daily-profile decomposition of a fitted model.

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqstab::boosting::{train_gbt, Dataset, GbtParams};
use freqstab::explain::{daily_profile_decomposition, interventional_shap, mean_abs_importance, path_dependent_shap, shap_interactions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 24 * 60;
    let hours: Vec<u32> = (0..n).map(|i| (i % 24) as u32).collect();
    let x = Array2::from_shape_fn((n, 3), |(i, j)| if j == 2 { hours[i] as f64 } else { rng.random_range(-1.0..1.0) });
    // x0 x1 interact; the hour adds a daily cycle
    let y: Vec<f64> = x.rows().into_iter().map(|r| r[0] * r[1] + 0.3 * (r[2] * std::f64::consts::PI / 12.0).sin()).collect();
    let data = Dataset::new(vec!["x0".into(), "x1".into(), "Hour".into()], x, y)?;
    let model = train_gbt(&data, None, &GbtParams { max_depth: 4, max_rounds: 200, ..Default::default() })?;

    let background = data.x.select(Axis(0), &(0..100).collect::<Vec<_>>());
    let interventional = interventional_shap(&model, data.x.view(), background.view())?;
    let path = path_dependent_shap(&model, data.x.view())?;
    println!("additivity: interventional {:.1e}, path-dependent {:.1e}", interventional.max_additivity_error(), path.max_additivity_error());
    for f in mean_abs_importance(&interventional) {
        println!("  {:<5} mean |SHAP| {:.4}", f.feature, f.mean_abs_shap);
    }

    let inter = shap_interactions(&model, data.x.slice(ndarray::s![..300, ..]))?;
    if let Some((j, k, mass)) = inter.strongest_pair() {
        println!("strongest pair {} x {} (mass {mass:.3})", inter.feature_names[j], inter.feature_names[k]);
    }

    let daily = daily_profile_decomposition(&interventional, &hours, 2)?;
    println!("daily decomposition error {:.1e}; features kept {:?}", daily.max_additivity_error(), daily.features);
    Ok(())
}
