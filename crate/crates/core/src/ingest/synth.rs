use std::collections::BTreeMap;
use std::f64::consts::PI;

use chrono::{DateTime, Datelike, Utc, Weekday};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::catalog::{LOAD, LOAD_RAMP, PRICES};
use super::{RawSeries, Unit};
use crate::boosting::Dataset;
use crate::signal::{Area, FrequencyTrace, Indicator, GAMMA};
use crate::time::{add_hours, parse_utc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Load-ramp driven deviations with a step and a pairwise interaction.
    CeLike,
    /// Noise-dominated deviations with a weak renewable-ramp signal.
    GbLike,
    /// Load-forecast-error driven deviations with a short time scale.
    NordicLike,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Self::CeLike, Self::GbLike, Self::NordicLike];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::CeLike => "ce_like",
            Self::GbLike => "gb_like",
            Self::NordicLike => "nordic_like",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.as_str() == s)
    }

    pub fn area(self) -> Area {
        match self {
            Self::CeLike => Area::ContinentalEurope,
            Self::GbLike => Area::GreatBritain,
            Self::NordicLike => Area::Nordic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthOptions {
    pub seed: u64,
    pub n_days: usize,
    pub scenario: Scenario,
    /// Scale of all stochastic disturbances of the frequency; 0 makes every
    /// indicator an exact function of the features and removes gaps.
    pub noise: f64,
    pub start: DateTime<Utc>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { seed: 0, n_days: 60, scenario: Scenario::CeLike, noise: 1.0, start: parse_utc("2019-01-07T00:00:00Z").expect("literal") }
    }
}

/// Planted feature → indicator relationship of a synthetic area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub scenario: Scenario,
    pub seed: u64,
    pub n_days: usize,
    pub noise: f64,
    /// Indicator whose hourly value is (up to noise) the planted amplitude.
    pub target: Indicator,
    pub driver: String,
    /// Amplitude drops by `step_size` once the driver exceeds this value.
    pub step_threshold: Option<f64>,
    pub step_size: Option<f64>,
    pub interaction: Option<(String, String)>,
    /// Named coefficients of the amplitude model.
    pub coefficients: BTreeMap<String, f64>,
    /// Time of the hourly pulse peak after the hour boundary.
    pub pulse_peak_s: f64,
    /// Regions whose missing share exceeds the default threshold.
    pub sparse_regions: Vec<String>,
    /// Indicative ramp rates (fraction of capacity per minute).
    pub ramp_rates: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct SyntheticArea {
    pub options: SynthOptions,
    pub trace: FrequencyTrace,
    pub raw: Vec<RawSeries>,
    pub truth: GroundTruth,
    /// Planted hourly pulse amplitudes (Hz).
    pub amplitudes: Vec<f64>,
}

struct Region {
    id: &'static str,
    share: f64,
    missing: f64,
}

struct Layout {
    load_level: f64,
    daily_amplitude: f64,
    load_noise: f64,
    regions: Vec<Region>,
    sparse: Region,
    quarter_hour: (&'static str, &'static str),
}

fn layout(scenario: Scenario) -> Layout {
    match scenario {
        Scenario::CeLike => Layout {
            load_level: 320_000.0,
            daily_amplitude: 0.05,
            load_noise: 3_000.0,
            regions: vec![
                Region { id: "DE", share: 0.5, missing: 0.002 },
                Region { id: "FR", share: 0.3, missing: 0.004 },
                Region { id: "PL", share: 0.2, missing: 0.006 },
            ],
            sparse: Region { id: "LU", share: 0.004, missing: 0.4 },
            quarter_hour: ("DE", "Solar generation"),
        },
        Scenario::NordicLike => Layout {
            load_level: 45_000.0,
            daily_amplitude: 0.1,
            load_noise: 400.0,
            regions: vec![
                Region { id: "NO", share: 0.35, missing: 0.002 },
                Region { id: "SE", share: 0.45, missing: 0.003 },
                Region { id: "FI", share: 0.2, missing: 0.005 },
            ],
            sparse: Region { id: "DK2", share: 0.01, missing: 0.45 },
            quarter_hour: ("SE", "Wind onshore generation"),
        },
        Scenario::GbLike => Layout {
            load_level: 32_000.0,
            daily_amplitude: 0.15,
            load_noise: 600.0,
            regions: vec![Region { id: "GB", share: 1.0, missing: 0.003 }],
            sparse: Region { id: "NIR", share: 0.02, missing: 0.5 },
            quarter_hour: ("GB", "Wind onshore generation"),
        },
    }
}

/// Seeded stream per component so that adding a component never shifts
/// the draws of another.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut x = sigma / (1.0 - phi * phi).sqrt() * normal(rng);
    for _ in 0..n {
        out.push(x);
        x = phi * x + sigma * normal(rng);
    }
    out
}

fn diff(x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = x[i] - x[i - 1];
    }
    out
}

fn daily_shape(hour: f64) -> f64 {
    -(2.0 * PI * (hour - 3.0) / 24.0).cos() - 0.3 * (4.0 * PI * (hour - 3.0) / 24.0).cos()
}

/// Unit-peak pulse `(s/τ)·e^{1−s/τ}`.
fn pulse(s: f64, peak: f64) -> f64 {
    let u = s / peak;
    u * (1.0 - u).exp()
}

/// Nominal hourly ramp scale of the gas and onshore-wind processes.
pub const RAMP_SCALE_MW: f64 = 1_500.0;

struct AreaSeries {
    series: Vec<(&'static str, Unit, Vec<f64>)>,
}

impl AreaSeries {
    fn get(&self, name: &str) -> &[f64] {
        &self.series.iter().find(|s| s.0 == name).expect("generated series").2
    }
}

fn generate_area(opts: &SynthOptions, lay: &Layout, hours: &[DateTime<Utc>]) -> AreaSeries {
    let n = hours.len();
    let seed = opts.seed;
    let mut rng = stream(seed, 1);
    let mut day_factor = Vec::new();
    for d in 0..=n / 24 {
        let weekend = matches!(add_hours(hours[0], 24 * d as i64).weekday(), Weekday::Sat | Weekday::Sun);
        day_factor.push(if weekend { 0.85 } else { 1.0 } * (1.0 + 0.04 * normal(&mut rng)));
    }
    let load_noise = ar1(&mut stream(seed, 2), n, 0.3, lay.load_noise);
    let hod = |i: usize| (i % 24) as f64;
    let load: Vec<f64> =
        (0..n).map(|i| lay.load_level * day_factor[i / 24] * (1.0 + lay.daily_amplitude * daily_shape(hod(i))) + load_noise[i]).collect();
    let mean_load = load.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = load.iter().map(|l| l - mean_load).collect();
    let k = lay.load_level / 320_000.0;

    let mut rng = stream(seed, 3);
    let clouds: Vec<f64> = (0..=n / 24).map(|_| rng.random_range(0.3..1.0)).collect();
    let solar: Vec<f64> = (0..n).map(|i| 40_000.0 * k * (PI * (hod(i) - 6.0) / 12.0).sin().max(0.0) * clouds[i / 24]).collect();
    let wind_state = ar1(&mut stream(seed, 4), n, 0.95, 0.25);
    let wind: Vec<f64> = wind_state.iter().map(|w| (30_000.0 * k + RAMP_SCALE_MW * 4.0 * k * w).max(0.0)).collect();
    let offshore_state = ar1(&mut stream(seed, 5), n, 0.95, 0.25);
    let offshore: Vec<f64> = offshore_state.iter().map(|w| (8_000.0 * k + 1_500.0 * k * w).max(0.0)).collect();
    let gas_state = ar1(&mut stream(seed, 6), n, 0.9, 0.3);
    let gas: Vec<f64> = gas_state.iter().map(|g| 40_000.0 * k + RAMP_SCALE_MW / 0.3 * k * g).collect();
    let mut rng = stream(seed, 7);
    let mut small = |level: f64, follow: f64, jitter: f64| -> Vec<f64> {
        dev.iter().map(|d| level * k + follow * d + jitter * k * normal(&mut rng)).collect()
    };
    let nuclear = small(60_000.0, 0.15, 300.0);
    let lignite = small(45_000.0, 0.3, 400.0);
    let hard_coal = small(25_000.0, 0.25, 400.0);
    let biomass = small(12_000.0, 0.0, 150.0);
    let pumped = small(3_000.0, 0.1, 200.0);
    let waste = small(2_000.0, 0.0, 50.0);
    let run_of_river = small(15_000.0, 0.02, 200.0);
    let reservoir = small(20_000.0, 0.2, 300.0);

    let fe_load = ar1(&mut stream(seed, 8), n, 0.8, 1_000.0 * k.sqrt());
    let fe_gen = ar1(&mut stream(seed, 9), n, 0.8, 800.0 * k.sqrt());
    let fe_wind = ar1(&mut stream(seed, 10), n, 0.9, 700.0 * k.sqrt());
    let fe_off = ar1(&mut stream(seed, 11), n, 0.9, 200.0 * k.sqrt());
    let mut rng = stream(seed, 12);
    let fe_solar: Vec<f64> = solar.iter().map(|s| 0.05 * s * normal(&mut rng)).collect();
    let price_noise = ar1(&mut stream(seed, 13), n, 0.5, 4.0);
    let mean_wind = wind.iter().sum::<f64>() / n as f64;
    let price: Vec<f64> = (0..n).map(|i| 45.0 + 0.0006 / k * dev[i] - 0.0004 / k * (wind[i] - mean_wind) + price_noise[i]).collect();

    let mut series: Vec<(&'static str, Unit, Vec<f64>)> = vec![
        (LOAD, Unit::Mw, load.clone()),
        ("Solar generation", Unit::Mw, solar.clone()),
        ("Wind onshore generation", Unit::Mw, wind.clone()),
        ("Nuclear generation", Unit::Mw, nuclear),
        ("Gas generation", Unit::Mw, gas),
        ("Biomass generation", Unit::Mw, biomass),
        ("Run-off-river hydro generation", Unit::Mw, run_of_river),
        ("Waste generation", Unit::Mw, waste),
    ];
    match opts.scenario {
        Scenario::CeLike => {
            series.push(("Lignite generation", Unit::Mw, lignite));
            series.push(("Hard coal generation", Unit::Mw, hard_coal));
            series.push(("Pumped hydro generation", Unit::Mw, pumped));
            series.push(("Wind offshore generation", Unit::Mw, offshore.clone()));
        }
        Scenario::NordicLike => series.push(("Reservoir hydro generation", Unit::Mw, reservoir)),
        Scenario::GbLike => {
            series.push(("Pumped hydro generation", Unit::Mw, pumped));
            series.push(("Wind offshore generation", Unit::Mw, offshore.clone()));
        }
    }
    let total: Vec<f64> = (0..n).map(|i| series.iter().skip(1).map(|s| s.2[i]).sum()).collect();
    let has_offshore = series.iter().any(|s| s.0 == "Wind offshore generation");
    series.push(("Load day-ahead", Unit::Mw, (0..n).map(|i| load[i] + fe_load[i]).collect()));
    series.push(("Scheduled generation", Unit::Mw, (0..n).map(|i| total[i] + fe_gen[i]).collect()));
    series.push(("Solar day-ahead", Unit::Mw, (0..n).map(|i| (solar[i] + fe_solar[i]).max(0.0)).collect()));
    series.push(("Onshore wind day-ahead", Unit::Mw, (0..n).map(|i| wind[i] + fe_wind[i]).collect()));
    if has_offshore {
        series.push(("Offshore wind day-ahead", Unit::Mw, (0..n).map(|i| offshore[i] + fe_off[i]).collect()));
    }
    series.push((PRICES, Unit::Price, price));
    AreaSeries { series }
}

struct Amplitude {
    values: Vec<f64>,
    truth: GroundTruthParts,
}

struct GroundTruthParts {
    target: Indicator,
    driver: &'static str,
    step_threshold: Option<f64>,
    step_size: Option<f64>,
    interaction: Option<(&'static str, &'static str)>,
    coefficients: Vec<(&'static str, f64)>,
    pulse_peak_s: f64,
    frequency_noise_hz: f64,
}

fn amplitudes(opts: &SynthOptions, area: &AreaSeries) -> Amplitude {
    let n = area.get(LOAD).len();
    let mut rng = stream(opts.seed, 20);
    let eps: Vec<f64> = (0..n).map(|_| opts.noise * normal(&mut rng)).collect();
    match opts.scenario {
        Scenario::CeLike => {
            let (base, slope, thr, step, inter, jitter) = (-0.04, -0.012e-3, 3_000.0, -0.05, 0.03, 0.004);
            let lr = diff(area.get(LOAD));
            let zg = diff(area.get("Gas generation"));
            let zw = diff(area.get("Wind onshore generation"));
            let values = (0..n)
                .map(|i| {
                    base + slope * lr[i] + if lr[i] > thr { step } else { 0.0 } + inter * (zg[i] / RAMP_SCALE_MW) * (zw[i] / RAMP_SCALE_MW) + jitter * eps[i]
                })
                .collect();
            Amplitude {
                values,
                truth: GroundTruthParts {
                    target: Indicator::Nadir,
                    driver: LOAD_RAMP,
                    step_threshold: Some(thr),
                    step_size: Some(step),
                    interaction: Some(("Gas ramp", "Onshore wind ramp")),
                    coefficients: vec![("intercept", base), ("load_ramp_slope", slope), ("interaction", inter), ("jitter", jitter)],
                    pulse_peak_s: 60.0,
                    frequency_noise_hz: 0.002,
                },
            }
        }
        Scenario::NordicLike => {
            let (base, fe_coef, da_coef, jitter) = (-0.015, 0.05e-3, 0.012e-3, 0.003);
            let load = area.get(LOAD);
            let da = area.get("Load day-ahead");
            let da_ramp = diff(da);
            let values = (0..n).map(|i| base + fe_coef * (da[i] - load[i]) + da_coef * da_ramp[i] + jitter * eps[i]).collect();
            Amplitude {
                values,
                truth: GroundTruthParts {
                    target: Indicator::Rocof,
                    driver: "Forecast error load",
                    step_threshold: None,
                    step_size: None,
                    interaction: None,
                    coefficients: vec![("intercept", base), ("forecast_error_slope", fe_coef), ("day_ahead_ramp_slope", da_coef), ("jitter", jitter)],
                    pulse_peak_s: 30.0,
                    frequency_noise_hz: 0.002,
                },
            }
        }
        Scenario::GbLike => {
            let (base, solar_coef, jitter) = (-0.03, -0.02e-3, 0.01);
            let sr = diff(area.get("Solar generation"));
            let values = (0..n).map(|i| base + solar_coef * sr[i] + jitter * eps[i]).collect();
            Amplitude {
                values,
                truth: GroundTruthParts {
                    target: Indicator::Nadir,
                    driver: "Solar ramp",
                    step_threshold: None,
                    step_size: None,
                    interaction: None,
                    coefficients: vec![("intercept", base), ("solar_ramp_slope", solar_coef), ("jitter", jitter)],
                    pulse_peak_s: 60.0,
                    frequency_noise_hz: 0.006,
                },
            }
        }
    }
}

fn frequency_trace(opts: &SynthOptions, amp: &[f64], parts: &GroundTruthParts) -> FrequencyTrace {
    let n_hours = amp.len();
    let len = n_hours * GAMMA + 1;
    let mut values = vec![0.0; len];
    let sigma = parts.frequency_noise_hz * opts.noise;
    let corr = 60.0f64;
    let decay = (-1.0 / corr).exp();
    let kick = sigma * (1.0 - decay * decay).sqrt();
    let mut rng = stream(opts.seed, 30);
    let mut ou = if sigma > 0.0 { sigma * normal(&mut rng) } else { 0.0 };
    for (t, v) in values.iter_mut().enumerate() {
        let hour = (t / GAMMA).min(n_hours - 1);
        let s = (t - hour * GAMMA) as f64;
        *v = amp[hour] * pulse(s, parts.pulse_peak_s) + ou;
        if sigma > 0.0 {
            ou = decay * ou + kick * normal(&mut rng);
        }
    }
    if opts.noise > 0.0 {
        let mut rng = stream(opts.seed, 31);
        for h in 0..n_hours {
            if rng.random_bool(0.01) {
                let at = h * GAMMA + rng.random_range(600..GAMMA - 200);
                for v in &mut values[at..at + 120] {
                    *v = f64::NAN;
                }
            }
        }
    }
    FrequencyTrace::from_centered(opts.start, values).expect("aligned start and consistent lengths")
}

fn regional_series(opts: &SynthOptions, lay: &Layout, area: &AreaSeries, hours: &[DateTime<Utc>]) -> Vec<RawSeries> {
    let mut out = Vec::new();
    let mut rng = stream(opts.seed, 40);
    let price_offsets: Vec<f64> = lay.regions.iter().map(|_| 3.0 * normal(&mut rng)).collect();
    for (name, unit, values) in &area.series {
        let generation = name.ends_with("generation") && *name != "Scheduled generation";
        let weight = if generation { 0.2 } else { 1.0 };
        for (r, region) in lay.regions.iter().enumerate() {
            let regional: Vec<Option<f64>> = values
                .iter()
                .map(|v| {
                    let missing = rng.random_bool(region.missing * weight);
                    let v = if *unit == Unit::Price { v + price_offsets[r] } else { v * region.share };
                    (!missing).then_some(v)
                })
                .collect();
            if (region.id, *name) == lay.quarter_hour {
                let mut ts = Vec::with_capacity(4 * hours.len());
                let mut vs = Vec::with_capacity(4 * hours.len());
                for (h, v) in hours.iter().zip(&regional) {
                    let wiggle = 0.01 * v.unwrap_or(0.0).abs() * rng.random_range(0.0..1.0);
                    for (q, d) in [wiggle, -wiggle, 0.5 * wiggle, -0.5 * wiggle].into_iter().enumerate() {
                        ts.push(*h + chrono::Duration::minutes(15 * q as i64));
                        vs.push(v.map(|v| v + d));
                    }
                }
                out.push(RawSeries { region: region.id.into(), feature: name.to_string(), unit: *unit, timestamps: ts, values: vs });
            } else {
                out.push(RawSeries { region: region.id.into(), feature: name.to_string(), unit: *unit, timestamps: hours.to_vec(), values: regional });
            }
        }
        if *name == LOAD || *name == "Load day-ahead" {
            let sparse: Vec<Option<f64>> =
                values.iter().map(|v| (!rng.random_bool(lay.sparse.missing)).then_some(v * lay.sparse.share)).collect();
            out.push(RawSeries { region: lay.sparse.id.into(), feature: name.to_string(), unit: *unit, timestamps: hours.to_vec(), values: sparse });
        }
    }
    out
}

/// Deterministic synthetic area: regional input series, a 1 Hz frequency
/// trace whose hourly pulse amplitude follows a known function of the
/// engineered features, and the ground truth of that function.
pub fn generate_synthetic_area(opts: &SynthOptions) -> SyntheticArea {
    let n_hours = 24 * opts.n_days.max(1);
    let hours: Vec<DateTime<Utc>> = (0..n_hours).map(|i| add_hours(opts.start, i as i64)).collect();
    let lay = layout(opts.scenario);
    let area = generate_area(opts, &lay, &hours);
    let amp = amplitudes(opts, &area);
    let trace = frequency_trace(opts, &amp.values, &amp.truth);
    let raw = regional_series(opts, &lay, &area, &hours);
    let p = &amp.truth;
    let truth = GroundTruth {
        scenario: opts.scenario,
        seed: opts.seed,
        n_days: opts.n_days.max(1),
        noise: opts.noise,
        target: p.target,
        driver: p.driver.into(),
        step_threshold: p.step_threshold,
        step_size: p.step_size,
        interaction: p.interaction.map(|(a, b)| (a.into(), b.into())),
        coefficients: p.coefficients.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        pulse_peak_s: p.pulse_peak_s,
        sparse_regions: vec![lay.sparse.id.into()],
        ramp_rates: default_ramp_rates(),
    };
    SyntheticArea { options: opts.clone(), trace, raw, truth, amplitudes: amp.values }
}

/// Indicative ramp rates by generation type.
pub fn default_ramp_rates() -> BTreeMap<String, f64> {
    [
        ("Nuclear generation", 0.02),
        ("Lignite generation", 0.03),
        ("Hard coal generation", 0.04),
        ("Biomass generation", 0.05),
        ("Gas generation", 0.08),
        ("Run-off-river hydro generation", 0.10),
        ("Reservoir hydro generation", 0.15),
        ("Pumped hydro generation", 0.15),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// A dataset where `driver` causes the target and `correlated` merely
/// tracks the driver.
#[derive(Debug, Clone)]
pub struct LeakageData {
    pub dataset: Dataset,
    pub driver: String,
    pub correlated: String,
}

pub fn generate_leakage_dataset(seed: u64, n: usize) -> LeakageData {
    let mut rng = stream(seed, 50);
    let names = vec![LOAD_RAMP.to_string(), "Nuclear ramp".to_string(), "Gas ramp".to_string(), "Hour".to_string()];
    let mut x = Array2::zeros((n, 4));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let hour = (i % 24) as f64;
        let lr = 3_000.0 * (daily_shape(hour) - daily_shape(hour - 1.0)) + 2_500.0 * normal(&mut rng);
        let nuclear = 0.15 * lr + 200.0 * normal(&mut rng);
        let gas = RAMP_SCALE_MW * normal(&mut rng);
        x[[i, 0]] = lr;
        x[[i, 1]] = nuclear;
        x[[i, 2]] = gas;
        x[[i, 3]] = hour;
        y.push(0.5e-4 * lr + 0.01 * normal(&mut rng));
    }
    LeakageData {
        dataset: Dataset::new(names, x, y).expect("consistent shapes"),
        driver: LOAD_RAMP.into(),
        correlated: "Nuclear ramp".into(),
    }
}
