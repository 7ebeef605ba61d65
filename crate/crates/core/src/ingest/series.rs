use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{IngestError, Unit};
use crate::time::{add_hours, floor_hour, HOUR_SECONDS};

/// Values on a regular hourly grid starting at `start`; `None` is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlySeries {
    pub start: DateTime<Utc>,
    pub values: Vec<Option<f64>>,
}

impl HourlySeries {
    pub fn new(start: DateTime<Utc>, values: Vec<Option<f64>>) -> Self {
        Self { start, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Exclusive end of the grid.
    pub fn end(&self) -> DateTime<Utc> {
        add_hours(self.start, self.values.len() as i64)
    }

    pub fn hour(&self, i: usize) -> DateTime<Utc> {
        add_hours(self.start, i as i64)
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Share of missing entries; 1 for an empty series.
    pub fn missing_share(&self) -> f64 {
        if self.values.is_empty() {
            1.0
        } else {
            self.missing_count() as f64 / self.values.len() as f64
        }
    }

    pub fn mean(&self) -> Option<f64> {
        let present: Vec<f64> = self.values.iter().flatten().copied().collect();
        (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
    }

    /// Re-expresses the series on `[start, end)`, padding with missing.
    pub fn reindex(&self, start: DateTime<Utc>, end: DateTime<Utc>) -> Self {
        let n = ((end - start).num_seconds() / HOUR_SECONDS).max(0) as usize;
        let offset = (self.start - start).num_seconds() / HOUR_SECONDS;
        let values = (0..n as i64)
            .map(|i| {
                let j = i - offset;
                if j >= 0 && (j as usize) < self.values.len() {
                    self.values[j as usize]
                } else {
                    None
                }
            })
            .collect();
        Self { start, values }
    }
}

/// A raw regional series at its native cadence.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub region: String,
    pub feature: String,
    pub unit: Unit,
    pub timestamps: Vec<DateTime<Utc>>,
    pub values: Vec<Option<f64>>,
}

/// A regional series on the hourly grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSeries {
    pub region: String,
    pub feature: String,
    pub unit: Unit,
    pub series: HourlySeries,
}

/// Hourly means of a series whose cadence divides one hour. An hour with
/// any absent or missing sub-hourly slot is missing.
pub fn downsample_to_hourly(raw: &RawSeries) -> Result<RegionSeries, IngestError> {
    let irregular = |detail: String| IngestError::IrregularCadence { region: raw.region.clone(), feature: raw.feature.clone(), detail };
    if raw.timestamps.len() != raw.values.len() {
        return Err(irregular(format!("{} timestamps for {} values", raw.timestamps.len(), raw.values.len())));
    }
    let Some(&first) = raw.timestamps.first() else {
        return Err(IngestError::EmptySeries { region: raw.region.clone(), feature: raw.feature.clone() });
    };
    let mut cadence = HOUR_SECONDS;
    for w in raw.timestamps.windows(2) {
        let d = (w[1] - w[0]).num_seconds();
        if d <= 0 {
            return Err(irregular(format!("timestamps not strictly increasing at {}", w[1])));
        }
        cadence = cadence.min(d);
    }
    if HOUR_SECONDS % cadence != 0 {
        return Err(irregular(format!("cadence of {cadence} s does not divide one hour")));
    }
    let start = floor_hour(first);
    let last = *raw.timestamps.last().expect("non-empty");
    let n_hours = ((floor_hour(last) - start).num_seconds() / HOUR_SECONDS + 1) as usize;
    let per_hour = (HOUR_SECONDS / cadence) as usize;
    let mut sums = vec![0.0; n_hours];
    let mut counts = vec![0usize; n_hours];
    let mut poisoned = vec![false; n_hours];
    for (ts, v) in raw.timestamps.iter().zip(&raw.values) {
        let offset = (*ts - start).num_seconds();
        if offset % cadence != 0 {
            return Err(irregular(format!("timestamp {ts} is off the {cadence} s grid")));
        }
        let h = (offset / HOUR_SECONDS) as usize;
        match v {
            Some(v) => {
                sums[h] += v;
                counts[h] += 1;
            }
            None => poisoned[h] = true,
        }
    }
    let values = (0..n_hours).map(|h| (!poisoned[h] && counts[h] == per_hour).then(|| sums[h] / per_hour as f64)).collect();
    Ok(RegionSeries { region: raw.region.clone(), feature: raw.feature.clone(), unit: raw.unit, series: HourlySeries { start, values } })
}
