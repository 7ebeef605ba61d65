use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{HourlySeries, IngestError, RegionSeries, Unit};

/// Closed interval of plausible values; either side may be open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl Bounds {
    pub fn contains(&self, v: f64) -> bool {
        self.min.is_none_or(|m| v >= m) && self.max.is_none_or(|m| v <= m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationPolicy {
    /// Largest tolerated missing share of an aggregate, in `(0, 1]`.
    pub nan_share_threshold: f64,
    /// Region id to region type (country, bidding zone, control zone).
    pub region_types: BTreeMap<String, String>,
    /// Feature name to outlier bounds.
    pub outlier_bounds: BTreeMap<String, Bounds>,
}

impl Default for AggregationPolicy {
    fn default() -> Self {
        Self { nan_share_threshold: 0.30, region_types: BTreeMap::new(), outlier_bounds: BTreeMap::new() }
    }
}

impl AggregationPolicy {
    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.nan_share_threshold > 0.0 && self.nan_share_threshold <= 1.0) {
            return Err(IngestError::InvalidPolicy(format!("nan_share_threshold {} outside (0, 1]", self.nan_share_threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmittedRegion {
    pub region: String,
    pub missing_share: f64,
    /// Mean over the region's present hours.
    pub mean_value: Option<f64>,
    /// `mean_value` relative to the aggregate's mean.
    pub relative_contribution: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaAggregate {
    pub feature: String,
    pub unit: Unit,
    pub series: HourlySeries,
    /// Included regions in summation order.
    pub included: Vec<String>,
    pub omitted: Vec<OmittedRegion>,
    pub missing_share: f64,
}

fn common_grid<'a>(regions: impl Iterator<Item = &'a HourlySeries> + Clone) -> (chrono::DateTime<chrono::Utc>, chrono::DateTime<chrono::Utc>) {
    let start = regions.clone().map(|s| s.start).min().expect("non-empty");
    let end = regions.map(HourlySeries::end).max().expect("non-empty");
    (start, end)
}

fn check_regions(regions: &[RegionSeries]) -> Result<(), IngestError> {
    let Some(first) = regions.first() else {
        return Err(IngestError::NoRegions);
    };
    let mut seen = BTreeSet::new();
    for r in regions {
        if r.feature != first.feature || r.unit != first.unit {
            return Err(IngestError::MixedRegions {
                expected: format!("{} [{}]", first.feature, first.unit.as_str()),
                got: format!("{} [{}]", r.feature, r.unit.as_str()),
            });
        }
        if !seen.insert(r.region.as_str()) {
            return Err(IngestError::DuplicateRegion(r.region.clone()));
        }
    }
    Ok(())
}

fn within(missing: usize, n: usize, threshold: f64) -> bool {
    missing as f64 <= threshold * n as f64 * (1.0 + 1e-12)
}

/// Sums regions in order of increasing missing share (ties by region id),
/// stopping before the first addition that would lift the aggregate's
/// missing share above the threshold. A missing entry in any summand makes
/// the sum missing. The least-missing region is always included.
pub fn aggregate_regions(regions: &[RegionSeries], policy: &AggregationPolicy) -> Result<AreaAggregate, IngestError> {
    policy.validate()?;
    check_regions(regions)?;
    let (start, end) = common_grid(regions.iter().map(|r| &r.series));
    let aligned: Vec<HourlySeries> = regions.iter().map(|r| r.series.reindex(start, end)).collect();
    let n = aligned[0].len();
    let mut order: Vec<usize> = (0..regions.len()).collect();
    let shares: Vec<f64> = aligned.iter().map(HourlySeries::missing_share).collect();
    order.sort_by(|&a, &b| shares[a].total_cmp(&shares[b]).then_with(|| regions[a].region.cmp(&regions[b].region)));

    let mut acc = aligned[order[0]].values.clone();
    let mut included = vec![regions[order[0]].region.clone()];
    let mut stop_at = order.len();
    for (pos, &k) in order.iter().enumerate().skip(1) {
        let candidate: Vec<Option<f64>> = acc.iter().zip(&aligned[k].values).map(|(a, b)| Some((*a)? + (*b)?)).collect();
        let missing = candidate.iter().filter(|v| v.is_none()).count();
        if !within(missing, n, policy.nan_share_threshold) {
            stop_at = pos;
            break;
        }
        acc = candidate;
        included.push(regions[k].region.clone());
    }
    let series = HourlySeries::new(start, acc);
    let aggregate_mean = series.mean();
    let omitted = order[stop_at..]
        .iter()
        .map(|&k| {
            let mean_value = aligned[k].mean();
            OmittedRegion {
                region: regions[k].region.clone(),
                missing_share: shares[k],
                mean_value,
                relative_contribution: mean_value.zip(aggregate_mean).and_then(|(m, a)| (a != 0.0).then(|| m / a)),
            }
        })
        .collect();
    Ok(AreaAggregate {
        feature: regions[0].feature.clone(),
        unit: regions[0].unit,
        missing_share: series.missing_share(),
        series,
        included,
        omitted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceAverage {
    pub series: HourlySeries,
    /// Hours where only some regions reported and weights were renormalised.
    pub renormalized: Vec<bool>,
    pub weights: BTreeMap<String, f64>,
}

/// Load-weighted mean price per hour over the regions reporting that hour.
/// Weights are full-period mean loads; an hour with no prices is missing.
pub fn weighted_price_average(prices: &[RegionSeries], mean_loads: &BTreeMap<String, f64>) -> Result<PriceAverage, IngestError> {
    check_regions(prices)?;
    let mut weights = BTreeMap::new();
    for p in prices {
        let w = *mean_loads.get(&p.region).ok_or_else(|| IngestError::MissingWeight(p.region.clone()))?;
        if !(w > 0.0 && w.is_finite()) {
            return Err(IngestError::InvalidWeight { region: p.region.clone(), weight: w });
        }
        weights.insert(p.region.clone(), w);
    }
    let (start, end) = common_grid(prices.iter().map(|r| &r.series));
    let aligned: Vec<HourlySeries> = prices.iter().map(|r| r.series.reindex(start, end)).collect();
    let n = aligned[0].len();
    let mut values = Vec::with_capacity(n);
    let mut renormalized = Vec::with_capacity(n);
    for h in 0..n {
        let (mut num, mut den, mut present) = (0.0, 0.0, 0);
        for (p, s) in prices.iter().zip(&aligned) {
            if let Some(v) = s.values[h] {
                let w = weights[&p.region];
                num += w * v;
                den += w;
                present += 1;
            }
        }
        values.push((present > 0).then(|| num / den));
        renormalized.push(present > 0 && present < prices.len());
    }
    Ok(PriceAverage { series: HourlySeries::new(start, values), renormalized, weights })
}

/// Marks values outside the closed `bounds` as missing; returns the count.
pub fn clean_outliers(series: &HourlySeries, bounds: &Bounds) -> (HourlySeries, usize) {
    let mut removed = 0;
    let values = series
        .values
        .iter()
        .map(|v| match v {
            Some(x) if !bounds.contains(*x) => {
                removed += 1;
                None
            }
            other => *other,
        })
        .collect();
    (HourlySeries::new(series.start, values), removed)
}
