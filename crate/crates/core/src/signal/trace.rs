use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::SignalError;
use crate::time;

/// Nominal grid frequency subtracted from raw recordings.
pub const NOMINAL_HZ: f64 = 50.0;

/// Non-missing samples with |f| at or above this bound are flagged as
/// corrupted and turned into missing samples.
pub const SANITY_BOUND_HZ: f64 = 2.0;

/// Seconds per hourly interval (γ).
pub const GAMMA: usize = 3600;

/// Samples in one closed hourly window `t_i, t_i + τ, ..., t_i + γτ`.
pub const HOURLY_SAMPLES: usize = GAMMA + 1;

/// Centered grid frequency `f(t) = f_raw(t) - 50 Hz` at a fixed 1 s cadence.
///
/// The trace starts on an hour boundary. Hour `i` covers samples
/// `3600 i ..= 3600 (i + 1)`, so neighbouring hours share their boundary
/// sample and a trace of `n` whole hours holds `3600 n + 1` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTrace {
    start: DateTime<Utc>,
    values: Vec<f64>,
    missing: Vec<bool>,
    flagged: usize,
}

impl FrequencyTrace {
    /// Resolution τ in seconds.
    pub const RESOLUTION_S: f64 = 1.0;

    pub fn new(start: DateTime<Utc>, values: Vec<f64>, missing: Vec<bool>) -> Result<Self, SignalError> {
        if values.len() != missing.len() {
            return Err(SignalError::MaskLength { values: values.len(), mask: missing.len() });
        }
        if !time::is_hour_aligned(start) {
            return Err(SignalError::UnalignedStart(start));
        }
        let mut missing = missing;
        let mut flagged = 0;
        for (v, m) in values.iter().zip(missing.iter_mut()) {
            if !*m && !(v.abs() < SANITY_BOUND_HZ) {
                *m = true;
                flagged += 1;
            }
        }
        Ok(Self { start, values, missing, flagged })
    }

    /// Builds a trace from centered values where NaN marks a missing sample.
    pub fn from_centered(start: DateTime<Utc>, values: Vec<f64>) -> Result<Self, SignalError> {
        let missing = values.iter().map(|v| v.is_nan()).collect();
        Self::new(start, values, missing)
    }

    /// Builds a trace from raw frequency readings in Hz (NaN = missing).
    pub fn from_raw_hz(start: DateTime<Utc>, raw: Vec<f64>) -> Result<Self, SignalError> {
        Self::from_centered(start, raw.into_iter().map(|v| v - NOMINAL_HZ).collect())
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn missing(&self) -> &[bool] {
        &self.missing
    }

    /// Number of samples that violated the sanity bound and were flagged missing.
    pub fn flagged_count(&self) -> usize {
        self.flagged
    }

    /// Number of hourly rows; a trailing partial hour counts as a row.
    pub fn n_hours(&self) -> usize {
        if self.values.len() < 2 {
            0
        } else {
            (self.values.len() - 1).div_ceil(GAMMA)
        }
    }

    pub fn hour_start(&self, hour: usize) -> DateTime<Utc> {
        time::add_hours(self.start, hour as i64)
    }

    /// Closed hourly window of hour `hour`, or `None` when the trace ends
    /// before the window's last sample.
    pub fn hour_window(&self, hour: usize) -> Option<HourWindow<'_>> {
        let lo = hour * GAMMA;
        let hi = lo + HOURLY_SAMPLES;
        (hi <= self.values.len()).then(|| HourWindow { values: &self.values[lo..hi], missing: &self.missing[lo..hi] })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let values = self.values.iter().map(|v| v * factor).collect();
        Self { start: self.start, values, missing: self.missing.clone(), flagged: self.flagged }
    }
}

/// A borrowed hourly slice of a trace with its missing mask.
#[derive(Debug, Clone, Copy)]
pub struct HourWindow<'a> {
    pub values: &'a [f64],
    pub missing: &'a [bool],
}

impl<'a> HourWindow<'a> {
    /// Window with no missing samples.
    pub fn complete(values: &'a [f64]) -> Self {
        const NONE: [bool; HOURLY_SAMPLES] = [false; HOURLY_SAMPLES];
        assert!(values.len() <= HOURLY_SAMPLES, "use HourWindow {{ .. }} for longer slices");
        Self { values, missing: &NONE[..values.len()] }
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|m| **m).count()
    }

    pub(crate) fn present(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        let missing = self.missing;
        self.values.iter().enumerate().filter(move |(i, _)| !missing[*i]).map(|(i, v)| (i, *v))
    }
}

/// Synchronous areas with their own RoCoF time scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Area {
    ContinentalEurope,
    Nordic,
    GreatBritain,
}

impl Area {
    pub fn rocof_params(self) -> RocofParams {
        match self {
            Area::ContinentalEurope | Area::GreatBritain => RocofParams { smoothing_window: 60, search_half_width: 60 },
            Area::Nordic => RocofParams { smoothing_window: 30, search_half_width: 30 },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Area::ContinentalEurope => "continental_europe",
            Area::Nordic => "nordic",
            Area::GreatBritain => "great_britain",
        }
    }
}

/// Smoothing window `L` and search half width `T`, both in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RocofParams {
    pub smoothing_window: usize,
    pub search_half_width: usize,
}

impl RocofParams {
    pub const MAX_HALF_WIDTH: usize = 1800;

    pub fn new(smoothing_window: usize, search_half_width: usize) -> Result<Self, SignalError> {
        let p = Self { smoothing_window, search_half_width };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SignalError> {
        if self.smoothing_window < 1
            || self.search_half_width < 1
            || self.search_half_width > Self::MAX_HALF_WIDTH
        {
            return Err(SignalError::InvalidRocofParams(*self));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::parse_utc;

    fn t0() -> DateTime<Utc> {
        parse_utc("2019-01-01T00:00:00Z").unwrap()
    }

    #[test]
    fn rejects_unaligned_start_and_mask_mismatch() {
        let late = parse_utc("2019-01-01T00:00:01Z").unwrap();
        assert!(matches!(FrequencyTrace::new(late, vec![0.0], vec![false]), Err(SignalError::UnalignedStart(_))));
        assert!(matches!(
            FrequencyTrace::new(t0(), vec![0.0, 0.0], vec![false]),
            Err(SignalError::MaskLength { .. })
        ));
    }

    #[test]
    fn flags_out_of_range_samples() {
        let tr = FrequencyTrace::from_centered(t0(), vec![0.1, 2.5, -2.0, f64::NAN, 0.0]).unwrap();
        assert_eq!(tr.flagged_count(), 2);
        assert_eq!(tr.missing(), &[false, true, true, true, false]);
    }

    #[test]
    fn raw_values_are_centered() {
        let tr = FrequencyTrace::from_raw_hz(t0(), vec![50.02, 49.9]).unwrap();
        assert!((tr.values()[0] - 0.02).abs() < 1e-12);
        assert!((tr.values()[1] + 0.1).abs() < 1e-12);
    }

    #[test]
    fn hour_count_includes_closing_sample() {
        let tr = FrequencyTrace::from_centered(t0(), vec![0.0; 2 * GAMMA + 1]).unwrap();
        assert_eq!(tr.n_hours(), 2);
        assert!(tr.hour_window(1).is_some());
        let short = FrequencyTrace::from_centered(t0(), vec![0.0; 2 * GAMMA]).unwrap();
        assert_eq!(short.n_hours(), 2);
        assert!(short.hour_window(1).is_none());
    }

    #[test]
    fn area_window_parameters() {
        assert_eq!(Area::ContinentalEurope.rocof_params(), RocofParams { smoothing_window: 60, search_half_width: 60 });
        assert_eq!(Area::GreatBritain.rocof_params(), RocofParams { smoothing_window: 60, search_half_width: 60 });
        assert_eq!(Area::Nordic.rocof_params(), RocofParams { smoothing_window: 30, search_half_width: 30 });
        assert!(RocofParams::new(0, 10).is_err());
        assert!(RocofParams::new(10, 1801).is_err());
        assert!(RocofParams::new(1, 1800).is_ok());
    }
}
