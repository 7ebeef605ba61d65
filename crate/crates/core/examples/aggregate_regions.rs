//! Area aggregation of regional series with gaps, and the load-weighted
//! price average.

use std::collections::BTreeMap;

use chrono::{TimeZone, Utc};
use freqstab::ingest::{aggregate_regions, weighted_price_average, AggregationPolicy, HourlySeries, RegionSeries, Unit};

fn region(name: &str, feature: &str, unit: Unit, values: Vec<Option<f64>>) -> RegionSeries {
    let start = Utc.with_ymd_and_hms(2019, 1, 7, 0, 0, 0).unwrap();
    RegionSeries { region: name.into(), feature: feature.into(), unit, series: HourlySeries::new(start, values) }
}

fn with_gaps(base: f64, n: usize, gaps: std::ops::Range<usize>) -> Vec<Option<f64>> {
    (0..n).map(|i| (!gaps.contains(&i)).then_some(base + i as f64)).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 100;
    // 5 %, 30 % (covering the first region's gaps) and 35 % missing
    let loads = vec![
        region("A", "Load", Unit::Mw, with_gaps(40_000.0, n, 0..5)),
        region("B", "Load", Unit::Mw, with_gaps(20_000.0, n, 0..30)),
        region("C", "Load", Unit::Mw, with_gaps(5_000.0, n, 60..95)),
    ];
    let agg = aggregate_regions(&loads, &AggregationPolicy::default())?;
    println!("included {:?}, missing share {:.2}", agg.included, agg.missing_share);
    for o in &agg.omitted {
        println!("omitted {} ({:.0}% missing, {:.1}% of the aggregate mean)", o.region, 100.0 * o.missing_share, 100.0 * o.relative_contribution.unwrap_or(0.0));
    }

    let prices = vec![
        region("A", "Prices day-ahead", Unit::Price, with_gaps(40.0, n, 0..0)),
        region("B", "Prices day-ahead", Unit::Price, with_gaps(60.0, n, 10..20)),
    ];
    let weights: BTreeMap<String, f64> = [("A".to_string(), 3.0), ("B".to_string(), 1.0)].into();
    let avg = weighted_price_average(&prices, &weights)?;
    println!("price hour 0: {:.2}, hour 10 (B missing): {:.2}", avg.series.values[0].unwrap(), avg.series.values[10].unwrap());
    Ok(())
}
