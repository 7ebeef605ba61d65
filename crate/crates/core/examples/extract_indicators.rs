//! Hourly stability indicators from a synthetic 1 Hz recording.
//!
//! Run with `cargo run --release --example extract_indicators`.

use freqstab::ingest::{generate_synthetic_area, Scenario, SynthOptions};
use freqstab::signal::io::write_indicators;
use freqstab::signal::{extract_indicators, nadir_occurrence_histogram, ExtractOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let area = generate_synthetic_area(&SynthOptions { seed: 1, n_days: 2, scenario: Scenario::CeLike, ..Default::default() });
    let params = Scenario::CeLike.area().rocof_params();
    println!("{} samples, smoothing window {} s, search half width {} s", area.trace.len(), params.smoothing_window, params.search_half_width);

    let table = extract_indicators(&area.trace, params, ExtractOptions::default())?;
    let mut out = Vec::new();
    write_indicators(&table, &mut out)?;
    for line in String::from_utf8(out)?.lines().take(6) {
        println!("{line}");
    }

    let hist = nadir_occurrence_histogram(&area.trace)?;
    println!("share of Nadirs in the first five minutes: {:.2}", hist.share_before_minute(5));
    Ok(())
}
