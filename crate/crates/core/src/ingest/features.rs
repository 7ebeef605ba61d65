use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{DateTime, Datelike, Timelike, Utc};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::catalog::{catalog, feature_spec, Derivation, GENERATION_TYPES, NON_SYNCHRONOUS, SYNCHRONOUS_GENERATION, TOTAL_GENERATION};
use super::{Availability, HourlySeries, IngestError, Unit};
use crate::signal::io::{format_value, parse_value};
use crate::time::{format_utc, parse_utc, HOUR_SECONDS};

/// Ramp denominator in hours.
pub const RAMP_DT_HOURS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub availability: Availability,
    pub unit: Unit,
    pub values: Vec<Option<f64>>,
}

impl FeatureColumn {
    pub fn missing_share(&self) -> f64 {
        if self.values.is_empty() {
            return 1.0;
        }
        self.values.iter().filter(|v| v.is_none()).count() as f64 / self.values.len() as f64
    }
}

/// Hourly feature columns on a shared grid, ordered as in the catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFrame {
    pub hours: Vec<DateTime<Utc>>,
    pub columns: Vec<FeatureColumn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMetadata {
    pub name: String,
    pub availability: Availability,
    pub unit: Unit,
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineerOptions {
    /// Generation types left out of the synchronous sum.
    pub synchronous_exclude: Vec<String>,
}

impl Default for EngineerOptions {
    fn default() -> Self {
        Self { synchronous_exclude: NON_SYNCHRONOUS.iter().map(|s| s.to_string()).collect() }
    }
}

impl FeatureFrame {
    pub fn len(&self) -> usize {
        self.hours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hours.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&FeatureColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn hours_of_day(&self) -> Vec<u32> {
        self.hours.iter().map(|h| h.hour()).collect()
    }

    /// Columns known before delivery only.
    pub fn day_ahead_only(&self) -> Self {
        self.with_availability(Availability::DayAhead)
    }

    pub fn with_availability(&self, availability: Availability) -> Self {
        Self { hours: self.hours.clone(), columns: self.columns.iter().filter(|c| c.availability == availability).cloned().collect() }
    }

    /// Drops columns whose missing share exceeds `max_share`; returns them
    /// with their shares.
    pub fn retain_dense(&mut self, max_share: f64) -> Vec<(String, f64)> {
        let mut dropped = Vec::new();
        self.columns.retain(|c| {
            let share = c.missing_share();
            let keep = share <= max_share;
            if !keep {
                dropped.push((c.name.clone(), share));
            }
            keep
        });
        dropped
    }

    /// Dense matrix of the named columns with NaN for missing entries.
    pub fn to_matrix(&self, names: &[String]) -> Result<Array2<f64>, IngestError> {
        let cols: Vec<&FeatureColumn> =
            names.iter().map(|n| self.column(n).ok_or_else(|| IngestError::UnknownFeatureName(n.clone()))).collect::<Result<_, _>>()?;
        Ok(Array2::from_shape_fn((self.len(), cols.len()), |(i, j)| cols[j].values[i].unwrap_or(f64::NAN)))
    }

    pub fn metadata(&self) -> Vec<ColumnMetadata> {
        self.columns
            .iter()
            .map(|c| ColumnMetadata { name: c.name.clone(), availability: c.availability, unit: c.unit, missing: c.values.iter().filter(|v| v.is_none()).count() })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["hour_utc".to_string()];
        header.extend(self.names());
        wtr.write_record(&header)?;
        for (i, h) in self.hours.iter().enumerate() {
            let mut rec = vec![format_utc(*h)];
            rec.extend(self.columns.iter().map(|c| format_value(c.values[i])));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a frame written by [`FeatureFrame::write_csv`]; tags and units
    /// come from the catalog.
    pub fn read_csv<R: Read>(reader: R, source: &str) -> Result<Self, IngestError> {
        let parse = |line: u64, message: String| IngestError::Parse { file: source.into(), line, message };
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let headers = rdr.headers().map_err(|e| parse(1, e.to_string()))?.clone();
        if headers.get(0) != Some("hour_utc") {
            return Err(parse(1, "first column must be hour_utc".into()));
        }
        let mut columns = Vec::new();
        for name in headers.iter().skip(1) {
            let spec = feature_spec(name).ok_or_else(|| IngestError::UnknownFeatureName(name.into()))?;
            columns.push(FeatureColumn { name: name.into(), availability: spec.availability, unit: spec.unit, values: Vec::new() });
        }
        let mut hours = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| parse(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            hours.push(parse_utc(&record[0]).ok_or_else(|| parse(line, format!("bad timestamp {:?}", &record[0])))?);
            for (c, cell) in columns.iter_mut().zip(record.iter().skip(1)) {
                c.values.push(parse_value(cell).map_err(|m| parse(line, m))?);
            }
        }
        Ok(Self { hours, columns })
    }
}

fn ramp(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut out = Vec::with_capacity(values.len());
    out.extend(values.first().map(|_| None));
    out.extend(values.windows(2).map(|w| Some((w[1]? - w[0]?) / RAMP_DT_HOURS)));
    out
}

fn sum_columns(columns: &[&Vec<Option<f64>>], n: usize) -> Vec<Option<f64>> {
    (0..n).map(|i| columns.iter().try_fold(0.0, |acc, c| Some(acc + c[i]?))).collect()
}

/// Builds the catalog features derivable from the supplied base series:
/// generation sums, hourly ramps, forecast errors (day-ahead minus actual)
/// and calendar columns. Inputs are aligned on their common hourly grid.
pub fn engineer_features(base: &BTreeMap<String, HourlySeries>, options: &EngineerOptions) -> Result<FeatureFrame, IngestError> {
    for name in base.keys() {
        match feature_spec(name) {
            Some(spec) if spec.derivation == Derivation::Base => {}
            _ => return Err(IngestError::UnknownFeatureName(name.clone())),
        }
    }
    for name in &options.synchronous_exclude {
        if !GENERATION_TYPES.iter().any(|(g, _)| g == name) {
            return Err(IngestError::UnknownFeatureName(name.clone()));
        }
    }
    let Some(start) = base.values().map(|s| s.start).min() else {
        return Ok(FeatureFrame { hours: Vec::new(), columns: Vec::new() });
    };
    let end = base.values().map(HourlySeries::end).max().expect("non-empty");
    let n = ((end - start).num_seconds() / HOUR_SECONDS) as usize;
    let mut values: BTreeMap<&'static str, Vec<Option<f64>>> = BTreeMap::new();
    for spec in catalog() {
        if let Some(s) = base.get(spec.name) {
            values.insert(spec.name, s.reindex(start, end).values);
        }
    }
    let generation: Vec<&'static str> = GENERATION_TYPES.iter().map(|(g, _)| *g).filter(|g| values.contains_key(g)).collect();
    if !generation.is_empty() {
        let all: Vec<&Vec<Option<f64>>> = generation.iter().map(|g| &values[g]).collect();
        let total = sum_columns(&all, n);
        let sync: Vec<&Vec<Option<f64>>> =
            generation.iter().filter(|g| !options.synchronous_exclude.iter().any(|e| e == *g)).map(|g| &values[g]).collect();
        let sync = (!sync.is_empty()).then(|| sum_columns(&sync, n));
        values.insert(TOTAL_GENERATION, total);
        if let Some(s) = sync {
            values.insert(SYNCHRONOUS_GENERATION, s);
        }
    }
    let hours: Vec<DateTime<Utc>> = (0..n).map(|i| start + chrono::Duration::hours(i as i64)).collect();
    // Derived columns may depend on other derived columns; repeat until no
    // new column appears.
    loop {
        let before = values.len();
        derive_pass(&mut values, &hours);
        if values.len() == before {
            break;
        }
    }
    let columns = catalog()
        .iter()
        .filter_map(|spec| {
            values.remove(spec.name).map(|v| FeatureColumn { name: spec.name.into(), availability: spec.availability, unit: spec.unit, values: v })
        })
        .collect();
    Ok(FeatureFrame { hours, columns })
}

/// Adds every derivable column whose inputs are present and which is not
/// present yet.
fn derive_pass(values: &mut BTreeMap<&'static str, Vec<Option<f64>>>, hours: &[DateTime<Utc>]) {
    for spec in catalog() {
        if values.contains_key(spec.name) {
            continue;
        }
        let derived = match spec.derivation {

            Derivation::Ramp { parent } => values.get(parent).map(|p| ramp(p)),
            Derivation::Difference { minuend, subtrahend } => match (values.get(minuend), values.get(subtrahend)) {
                (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(a, b)| Some((*a)? - (*b)?)).collect()),
                _ => None,
            },
            Derivation::Calendar => Some(
                hours
                    .iter()
                    .map(|h| {
                        Some(match spec.name {
                            "Hour" => h.hour() as f64,
                            "Weekday" => h.weekday().num_days_from_monday() as f64,
                            _ => h.month() as f64,
                        })
                    })
                    .collect(),
            ),
            Derivation::Base | Derivation::Sum => None,
        };
        if let Some(d) = derived {
            values.insert(spec.name, d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::catalog::{FORECAST_PAIRS, LOAD, LOAD_RAMP};

    fn series(values: &[f64]) -> HourlySeries {
        HourlySeries::new(parse_utc("2019-03-04T22:00:00Z").unwrap(), values.iter().map(|&v| Some(v)).collect())
    }

    #[test]
    fn ramps_errors_and_calendar() {
        let base = BTreeMap::from([
            (LOAD.to_string(), series(&[50_000.0, 53_000.0, 53_000.0])),
            ("Load day-ahead".to_string(), series(&[60_000.0, 58_000.0, 52_000.0])),
            ("Gas generation".to_string(), series(&[7.0, 7.0, 7.0])),
            ("Solar generation".to_string(), series(&[0.0, 1.0, 2.0])),
        ]);
        let f = engineer_features(&base, &EngineerOptions::default()).unwrap();
        assert_eq!(f.column(LOAD_RAMP).unwrap().values, vec![None, Some(3000.0), Some(0.0)]);
        assert_eq!(f.column("Gas ramp").unwrap().values, vec![None, Some(0.0), Some(0.0)]);
        assert_eq!(f.column("Forecast error load").unwrap().values, vec![Some(10_000.0), Some(5_000.0), Some(-1_000.0)]);
        assert_eq!(f.column("Total generation").unwrap().values, vec![Some(7.0), Some(8.0), Some(9.0)]);
        assert_eq!(f.column("Synchronous generation").unwrap().values, vec![Some(7.0); 3]);
        assert_eq!(f.column("Hour").unwrap().values, vec![Some(22.0), Some(23.0), Some(0.0)]);
        // 2019-03-04 is a Monday
        assert_eq!(f.column("Weekday").unwrap().values, vec![Some(0.0), Some(0.0), Some(1.0)]);
        assert_eq!(f.column("Month").unwrap().values, vec![Some(3.0); 3]);
        assert!(f.column("Forecast error solar").is_none());
        let da = f.day_ahead_only();
        assert!(da.columns.iter().all(|c| c.availability == Availability::DayAhead));
        assert!(da.column("Load ramp day-ahead").is_some());
    }

    #[test]
    fn unknown_and_derived_names_are_rejected() {
        let bad = BTreeMap::from([("Load ramp".to_string(), series(&[1.0]))]);
        assert!(matches!(engineer_features(&bad, &EngineerOptions::default()), Err(IngestError::UnknownFeatureName(_))));
        let bad = BTreeMap::from([("Weather".to_string(), series(&[1.0]))]);
        assert!(engineer_features(&bad, &EngineerOptions::default()).is_err());
    }

    #[test]
    fn derived_columns_recompute_from_parents() {
        let load: Vec<f64> = (0..30).map(|i| 40_000.0 + 1234.5 * (i as f64 * 0.7).sin()).collect();
        let da: Vec<f64> = load.iter().enumerate().map(|(i, v)| v + 321.0 * (i as f64).cos()).collect();
        let base = BTreeMap::from([(LOAD.to_string(), series(&load)), ("Load day-ahead".to_string(), series(&da))]);
        let f = engineer_features(&base, &EngineerOptions::default()).unwrap();
        let p = &FORECAST_PAIRS[0];
        let col = |n: &str| f.column(n).unwrap().values.clone();
        for i in 1..30 {
            let (a, b) = (col(p.actual)[i].unwrap(), col(p.actual)[i - 1].unwrap());
            assert!((col(p.actual_ramp)[i].unwrap() - (a - b)).abs() <= 1e-12 * a.abs());
            let e = col(p.day_ahead_ramp)[i].unwrap() - col(p.actual_ramp)[i].unwrap();
            assert!((col(p.ramp_error)[i].unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_and_dense_filter() {
        let base = BTreeMap::from([(LOAD.to_string(), HourlySeries::new(parse_utc("2019-01-01T00:00:00Z").unwrap(), vec![Some(1.5), None, Some(2.25)]))]);
        let mut f = engineer_features(&base, &EngineerOptions::default()).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = FeatureFrame::read_csv(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, f);
        let dropped = f.retain_dense(0.5);
        assert_eq!(dropped, vec![(LOAD_RAMP.to_string(), 1.0)]);
        let m = f.to_matrix(&["Load".into(), "Hour".into()]).unwrap();
        assert!(m[[1, 0]].is_nan());
        assert_eq!(m[[2, 1]], 2.0);
    }
}
