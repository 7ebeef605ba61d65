//! Relative ramping speeds and the RoCoF role of each technology.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freqstab::analysis::{relative_ramp_speeds, RoleThresholds, TechnologySeries};
use freqstab::ingest::synth::default_ramp_rates;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rates = default_ramp_rates();
    let swings = [("Nuclear", 300.0), ("Hard coal", 900.0), ("Gas", 1500.0), ("Pumped hydro", 1200.0)];
    let series: Vec<TechnologySeries> = swings
        .iter()
        .map(|(name, swing)| TechnologySeries {
            name: name.to_string(),
            generation: (0..24 * 30).map(|_| Some(rng.random_range(0.0..*swing))).collect(),
            ramp_rate: rates[&format!("{name} generation")],
        })
        .collect();
    let mut table = relative_ramp_speeds(&series)?;

    // signs as a SHAP analysis of RoCoF would report them
    let directions: BTreeMap<String, f64> =
        [("Nuclear", -0.4), ("Hard coal", -0.2), ("Gas", 0.5), ("Pumped hydro", -0.3)].into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    table.classify(&directions, &RoleThresholds::default());
    println!("fastest: {}", table.fastest);
    for row in &table.rows {
        println!("{:<15} s = {:.3}  role {}", row.technology, row.relative_speed, row.role.map(|r| r.as_str()).unwrap_or("-"));
    }
    Ok(())
}
