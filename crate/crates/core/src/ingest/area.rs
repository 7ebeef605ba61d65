use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_regions, clean_outliers, weighted_price_average, AggregationPolicy, AreaAggregate, PriceAverage};
use super::catalog::{LOAD, PRICES};
use super::series::{downsample_to_hourly, HourlySeries, RawSeries, RegionSeries};
use super::IngestError;

/// Area-level hourly base series with the diagnostics of how they were built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaInputs {
    pub base: BTreeMap<String, HourlySeries>,
    /// One entry per summed feature, including omitted-region diagnostics.
    pub aggregates: Vec<AreaAggregate>,
    pub prices: Option<PriceAverage>,
    /// Feature name to number of hourly values removed as outliers.
    pub outliers_removed: BTreeMap<String, usize>,
}

/// Downsamples every regional series, sums each feature over regions under
/// the missing-share rule, averages prices weighted by regional mean load
/// and finally removes out-of-bounds area values.
pub fn assemble_area(raw: &[RawSeries], policy: &AggregationPolicy) -> Result<AreaInputs, IngestError> {
    policy.validate()?;
    if raw.is_empty() {
        return Err(IngestError::NoRegions);
    }
    let hourly: Vec<RegionSeries> = raw.par_iter().map(downsample_to_hourly).collect::<Result<_, _>>()?;
    let mut by_feature: BTreeMap<String, Vec<RegionSeries>> = BTreeMap::new();
    for s in hourly {
        by_feature.entry(s.feature.clone()).or_default().push(s);
    }

    let mut base = BTreeMap::new();
    let mut aggregates = Vec::new();
    let mut prices = None;
    for (feature, regions) in &by_feature {
        if feature == PRICES {
            let loads = by_feature.get(LOAD).map(Vec::as_slice).unwrap_or_default();
            let mean_loads: BTreeMap<String, f64> =
                loads.iter().filter_map(|l| l.series.mean().map(|m| (l.region.clone(), m))).collect();
            let avg = weighted_price_average(regions, &mean_loads)?;
            base.insert(feature.clone(), avg.series.clone());
            prices = Some(avg);
        } else {
            let agg = aggregate_regions(regions, policy)?;
            base.insert(feature.clone(), agg.series.clone());
            aggregates.push(agg);
        }
    }

    let mut outliers_removed = BTreeMap::new();
    for (feature, bounds) in &policy.outlier_bounds {
        if let Some(series) = base.get_mut(feature) {
            let (cleaned, removed) = clean_outliers(series, bounds);
            *series = cleaned;
            outliers_removed.insert(feature.clone(), removed);
        }
    }
    Ok(AreaInputs { base, aggregates, prices, outliers_removed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::catalog::Unit;
    use crate::time::{add_hours, parse_utc};

    fn raw(region: &str, feature: &str, unit: Unit, values: &[Option<f64>]) -> RawSeries {
        let t0 = parse_utc("2019-01-01T00:00:00Z").unwrap();
        RawSeries {
            region: region.into(),
            feature: feature.into(),
            unit,
            timestamps: (0..values.len()).map(|i| add_hours(t0, i as i64)).collect(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn loads_sum_and_prices_are_load_weighted() {
        let input = vec![
            raw("A", LOAD, Unit::Mw, &[Some(300.0), Some(300.0)]),
            raw("B", LOAD, Unit::Mw, &[Some(100.0), Some(100.0)]),
            raw("A", PRICES, Unit::Price, &[Some(40.0), None]),
            raw("B", PRICES, Unit::Price, &[Some(80.0), Some(70.0)]),
        ];
        let area = assemble_area(&input, &AggregationPolicy::default()).unwrap();
        assert_eq!(area.base[LOAD].values, vec![Some(400.0), Some(400.0)]);
        assert_eq!(area.base[PRICES].values, vec![Some(50.0), Some(70.0)]);
        assert_eq!(area.prices.unwrap().renormalized, vec![false, true]);
    }

    #[test]
    fn outliers_are_removed_after_aggregation() {
        let input = vec![raw("GB", LOAD, Unit::Mw, &[Some(30_000.0), Some(10.0), Some(29_000.0)])];
        let mut policy = AggregationPolicy::default();
        policy.outlier_bounds.insert(LOAD.into(), crate::ingest::Bounds { min: Some(5_000.0), max: None });
        let area = assemble_area(&input, &policy).unwrap();
        assert_eq!(area.base[LOAD].values, vec![Some(30_000.0), None, Some(29_000.0)]);
        assert_eq!(area.outliers_removed[LOAD], 1);
    }

    #[test]
    fn price_region_without_load_is_an_error() {
        let input = vec![raw("A", LOAD, Unit::Mw, &[Some(1.0)]), raw("C", PRICES, Unit::Price, &[Some(1.0)])];
        assert!(matches!(assemble_area(&input, &AggregationPolicy::default()), Err(IngestError::MissingWeight(r)) if r == "C"));
    }
}
