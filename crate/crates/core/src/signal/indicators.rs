use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::{FrequencyTrace, HourWindow, RocofParams, GAMMA};
use super::SignalError;

/// The four hourly stability indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    Nadir,
    Rocof,
    Msd,
    Integral,
}

impl Indicator {
    pub const ALL: [Indicator; 4] = [Indicator::Nadir, Indicator::Rocof, Indicator::Msd, Indicator::Integral];

    pub fn as_str(self) -> &'static str {
        match self {
            Indicator::Nadir => "nadir",
            Indicator::Rocof => "rocof",
            Indicator::Msd => "msd",
            Indicator::Integral => "integral",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.as_str() == name.to_ascii_lowercase())
    }
}

/// Signed value at the first sample of maximal absolute deviation.
pub fn compute_nadir(window: HourWindow<'_>) -> Result<f64, SignalError> {
    require_complete(window)?;
    nadir_of_present(window).ok_or(SignalError::MissingData)
}

/// `τ Σ f(t)` over the window.
pub fn compute_integral(window: HourWindow<'_>, tau: f64) -> Result<f64, SignalError> {
    require_complete(window)?;
    Ok(integral_of_present(window, tau))
}

/// `Σ f²(t) / γ` with γ = 3600, even though the closed window has 3601 samples.
pub fn compute_msd(window: HourWindow<'_>) -> Result<f64, SignalError> {
    require_complete(window)?;
    Ok(msd_of_present(window))
}

fn require_complete(window: HourWindow<'_>) -> Result<(), SignalError> {
    if window.values.is_empty() || window.missing.iter().any(|m| *m) {
        return Err(SignalError::MissingData);
    }
    Ok(())
}

fn argmax_abs(values: impl Iterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values {
        // strict comparison keeps the earliest sample on ties
        if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
            best = Some((i, v));
        }
    }
    best
}

fn nadir_of_present(window: HourWindow<'_>) -> Option<f64> {
    argmax_abs(window.present()).map(|(_, v)| v)
}

fn integral_of_present(window: HourWindow<'_>, tau: f64) -> f64 {
    tau * window.present().map(|(_, v)| v).sum::<f64>()
}

fn msd_of_present(window: HourWindow<'_>) -> f64 {
    window.present().map(|(_, v)| v * v).sum::<f64>() / GAMMA as f64
}

/// Smoothed derivative of the trace in Hz/s.
///
/// Increments `Δf(t) = f(t) - f(t-τ)` are averaged over a centered
/// rectangle of `L` samples covering `t - (L-1-⌊L/2⌋) ..= t + ⌊L/2⌋`,
/// which telescopes to `(f(t + ⌊L/2⌋) - f(t - L + ⌊L/2⌋)) / (L τ)`. For even `L`
/// that is the symmetric difference around `t`. Positions whose window
/// touches a missing sample or the series boundary are `None`.
pub fn estimate_derivative(trace: &FrequencyTrace, smoothing_window: usize) -> Vec<Option<f64>> {
    derivative_of(trace.values(), trace.missing(), smoothing_window, FrequencyTrace::RESOLUTION_S)
}

pub(crate) fn derivative_of(values: &[f64], missing: &[bool], window: usize, tau: f64) -> Vec<Option<f64>> {
    let n = values.len();
    let ahead = window / 2;
    let behind = window - ahead; // includes the extra sample for the first increment
    let mut missing_prefix = Vec::with_capacity(n + 1);
    missing_prefix.push(0usize);
    for m in missing {
        missing_prefix.push(missing_prefix.last().unwrap() + usize::from(*m));
    }
    (0..n)
        .map(|t| {
            if t < behind || t + ahead >= n {
                return None;
            }
            let lo = t - behind;
            let hi = t + ahead;
            if missing_prefix[hi + 1] - missing_prefix[lo] > 0 {
                return None;
            }
            Some((values[hi] - values[lo]) / (window as f64 * tau))
        })
        .collect()
}

/// Signed derivative at the steepest sample within `[center - T, center + T]`.
pub fn compute_rocof(derivative: &[Option<f64>], center: usize, search_half_width: usize) -> Result<f64, SignalError> {
    if center < search_half_width || center + search_half_width >= derivative.len() {
        return Err(SignalError::MissingData);
    }
    let window = &derivative[center - search_half_width..=center + search_half_width];
    let mut present = Vec::with_capacity(window.len());
    for (i, d) in window.iter().enumerate() {
        present.push((i, d.ok_or(SignalError::MissingData)?));
    }
    argmax_abs(present.into_iter()).map(|(_, v)| v).ok_or(SignalError::MissingData)
}

/// Options for [`extract_indicators`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Missing samples tolerated inside an hour before Nadir, Integral and
    /// MSD become missing. With a positive tolerance the indicators are
    /// evaluated over the present samples only.
    pub max_missing_per_hour: usize,
}

/// Hourly indicators for one synchronous area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTable {
    pub hours: Vec<DateTime<Utc>>,
    pub nadir: Vec<Option<f64>>,
    pub rocof: Vec<Option<f64>>,
    pub msd: Vec<Option<f64>>,
    pub integral: Vec<Option<f64>>,
}

impl IndicatorTable {
    pub fn len(&self) -> usize {
        self.hours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hours.is_empty()
    }

    pub fn column(&self, indicator: Indicator) -> &[Option<f64>] {
        match indicator {
            Indicator::Nadir => &self.nadir,
            Indicator::Rocof => &self.rocof,
            Indicator::Msd => &self.msd,
            Indicator::Integral => &self.integral,
        }
    }
}

/// Converts a trace into one indicator row per hour.
pub fn extract_indicators(
    trace: &FrequencyTrace,
    params: RocofParams,
    options: ExtractOptions,
) -> Result<IndicatorTable, SignalError> {
    params.validate()?;
    let n_hours = trace.n_hours();
    if n_hours == 0 {
        return Err(SignalError::EmptyTrace);
    }
    let derivative = estimate_derivative(trace, params.smoothing_window);
    let rows: Vec<_> = (0..n_hours)
        .into_par_iter()
        .map(|hour| {
            let hourly = trace.hour_window(hour).and_then(|w| {
                (w.missing_count() <= options.max_missing_per_hour)
                    .then(|| nadir_of_present(w).map(|nadir| (nadir, integral_of_present(w, FrequencyTrace::RESOLUTION_S), msd_of_present(w))))
                    .flatten()
            });
            let rocof = compute_rocof(&derivative, hour * GAMMA, params.search_half_width).ok();
            (hourly, rocof)
        })
        .collect();

    let mut table = IndicatorTable {
        hours: (0..n_hours).map(|h| trace.hour_start(h)).collect(),
        nadir: Vec::with_capacity(n_hours),
        rocof: Vec::with_capacity(n_hours),
        msd: Vec::with_capacity(n_hours),
        integral: Vec::with_capacity(n_hours),
    };
    for (hourly, rocof) in rows {
        table.nadir.push(hourly.map(|h| h.0));
        table.integral.push(hourly.map(|h| h.1));
        table.msd.push(hourly.map(|h| h.2));
        table.rocof.push(rocof);
    }
    Ok(table)
}

/// Minute-of-hour at which |f| peaks, accumulated over complete hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NadirHistogram {
    pub counts: Vec<u64>,
    pub hours_used: u64,
}

impl NadirHistogram {
    pub const BINS: usize = 60;

    pub fn density(&self) -> Vec<f64> {
        let total = self.hours_used.max(1) as f64;
        self.counts.iter().map(|c| *c as f64 / total).collect()
    }

    /// Share of hours whose peak falls in minutes `0..minutes`.
    pub fn share_before_minute(&self, minutes: usize) -> f64 {
        self.density().iter().take(minutes).sum()
    }
}

/// Histogram of Nadir occurrence minutes. The closing boundary sample
/// (second 3600) is counted in minute 59.
pub fn nadir_occurrence_histogram(trace: &FrequencyTrace) -> Result<NadirHistogram, SignalError> {
    let mut counts = vec![0u64; NadirHistogram::BINS];
    let mut hours_used = 0;
    for hour in 0..trace.n_hours() {
        let Some(window) = trace.hour_window(hour) else { continue };
        if window.missing_count() > 0 {
            continue;
        }
        if let Some((idx, _)) = argmax_abs(window.present()) {
            counts[(idx / 60).min(NadirHistogram::BINS - 1)] += 1;
            hours_used += 1;
        }
    }
    if hours_used == 0 {
        return Err(SignalError::EmptyTrace);
    }
    Ok(NadirHistogram { counts, hours_used })
}
