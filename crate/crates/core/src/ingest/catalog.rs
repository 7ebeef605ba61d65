use serde::{Deserialize, Serialize};

/// When a feature's value is known relative to delivery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Availability {
    DayAhead,
    ExPost,
}

impl Availability {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DayAhead => "day_ahead",
            Self::ExPost => "ex_post",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "day_ahead" | "day-ahead" => Some(Self::DayAhead),
            "ex_post" | "ex-post" => Some(Self::ExPost),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "MW")]
    Mw,
    #[serde(rename = "MW/h")]
    MwPerHour,
    #[serde(rename = "currency/MWh")]
    Price,
    #[serde(rename = "currency/MWh/h")]
    PricePerHour,
    #[serde(rename = "1")]
    Calendar,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mw => "MW",
            Self::MwPerHour => "MW/h",
            Self::Price => "currency/MWh",
            Self::PricePerHour => "currency/MWh/h",
            Self::Calendar => "1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Mw, Self::MwPerHour, Self::Price, Self::PricePerHour, Self::Calendar].into_iter().find(|u| u.as_str() == s.trim())
    }

    fn ramp(self) -> Self {
        match self {
            Self::Price => Self::PricePerHour,
            _ => Self::MwPerHour,
        }
    }
}

/// Actual generation types with the name of their ramp feature.
pub const GENERATION_TYPES: [(&str, &str); 18] = [
    ("Biomass generation", "Biomass ramp"),
    ("Coal gas generation", "Coal gas ramp"),
    ("Fossil peat generation", "Fossil peat ramp"),
    ("Gas generation", "Gas ramp"),
    ("Geothermal generation", "Geothermal ramp"),
    ("Hard coal generation", "Hard coal ramp"),
    ("Lignite generation", "Lignite ramp"),
    ("Nuclear generation", "Nuclear ramp"),
    ("Oil generation", "Oil ramp"),
    ("Other generation", "Other ramp"),
    ("Other renewable generation", "Other renewables ramp"),
    ("Pumped hydro generation", "Pumped hydro ramp"),
    ("Reservoir hydro generation", "Reservoir hydro ramp"),
    ("Run-off-river hydro generation", "Run-off-river hydro ramp"),
    ("Solar generation", "Solar ramp"),
    ("Waste generation", "Waste ramp"),
    ("Wind offshore generation", "Offshore wind ramp"),
    ("Wind onshore generation", "Onshore wind ramp"),
];

/// Generation types left out of the synchronous sum by default.
pub const NON_SYNCHRONOUS: [&str; 3] = ["Wind onshore generation", "Wind offshore generation", "Solar generation"];

pub const LOAD: &str = "Load";
pub const LOAD_RAMP: &str = "Load ramp";
pub const TOTAL_GENERATION: &str = "Total generation";
pub const TOTAL_GENERATION_RAMP: &str = "Total generation ramp";
pub const SYNCHRONOUS_GENERATION: &str = "Synchronous generation";
pub const PRICES: &str = "Prices day-ahead";
pub const PRICE_RAMP: &str = "Price ramp day-ahead";
pub const HOUR: &str = "Hour";
pub const WEEKDAY: &str = "Weekday";
pub const MONTH: &str = "Month";

/// A day-ahead quantity paired with its actual counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForecastPair {
    pub day_ahead: &'static str,
    pub actual: &'static str,
    pub error: &'static str,
    pub day_ahead_ramp: &'static str,
    pub actual_ramp: &'static str,
    pub ramp_error: &'static str,
}

pub const FORECAST_PAIRS: [ForecastPair; 5] = [
    ForecastPair {
        day_ahead: "Load day-ahead",
        actual: LOAD,
        error: "Forecast error load",
        day_ahead_ramp: "Load ramp day-ahead",
        actual_ramp: LOAD_RAMP,
        ramp_error: "Forecast error load ramp",
    },
    ForecastPair {
        day_ahead: "Scheduled generation",
        actual: TOTAL_GENERATION,
        error: "Forecast error total generation",
        day_ahead_ramp: "Generation ramp day-ahead",
        actual_ramp: TOTAL_GENERATION_RAMP,
        ramp_error: "Forecast error generation ramp",
    },
    ForecastPair {
        day_ahead: "Solar day-ahead",
        actual: "Solar generation",
        error: "Forecast error solar",
        day_ahead_ramp: "Solar ramp day-ahead",
        actual_ramp: "Solar ramp",
        ramp_error: "Forecast error solar ramp",
    },
    ForecastPair {
        day_ahead: "Offshore wind day-ahead",
        actual: "Wind offshore generation",
        error: "Forecast error offshore wind",
        day_ahead_ramp: "Offshore wind ramp day-ahead",
        actual_ramp: "Offshore wind ramp",
        ramp_error: "Forecast error offshore wind ramp",
    },
    ForecastPair {
        day_ahead: "Onshore wind day-ahead",
        actual: "Wind onshore generation",
        error: "Forecast error onshore wind",
        day_ahead_ramp: "Onshore wind ramp day-ahead",
        actual_ramp: "Onshore wind ramp",
        ramp_error: "Forecast error onshore wind ramp",
    },
];

/// How a catalog feature is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    /// Supplied as an input series.
    Base,
    /// Sum of actual generation columns.
    Sum,
    /// Hourly difference quotient of `parent`.
    Ramp { parent: &'static str },
    /// `minuend − subtrahend`.
    Difference { minuend: &'static str, subtrahend: &'static str },
    Calendar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub name: &'static str,
    pub availability: Availability,
    pub unit: Unit,
    pub derivation: Derivation,
}

fn build_catalog() -> Vec<FeatureSpec> {
    use Availability::{DayAhead, ExPost};
    let base = |name, availability, unit| FeatureSpec { name, availability, unit, derivation: Derivation::Base };
    let mut out = vec![base(LOAD, ExPost, Unit::Mw)];
    out.extend(GENERATION_TYPES.iter().map(|(g, _)| base(g, ExPost, Unit::Mw)));
    out.extend(FORECAST_PAIRS.iter().map(|p| base(p.day_ahead, DayAhead, Unit::Mw)));
    out.push(base(PRICES, DayAhead, Unit::Price));
    for name in [TOTAL_GENERATION, SYNCHRONOUS_GENERATION] {
        out.push(FeatureSpec { name, availability: ExPost, unit: Unit::Mw, derivation: Derivation::Sum });
    }
    let ramp = |name, parent, availability, unit: Unit| FeatureSpec { name, availability, unit: unit.ramp(), derivation: Derivation::Ramp { parent } };
    out.push(ramp(LOAD_RAMP, LOAD, ExPost, Unit::Mw));
    out.push(ramp(TOTAL_GENERATION_RAMP, TOTAL_GENERATION, ExPost, Unit::Mw));
    out.extend(GENERATION_TYPES.iter().map(|(g, r)| ramp(r, g, ExPost, Unit::Mw)));
    for p in &FORECAST_PAIRS {
        out.push(FeatureSpec { name: p.error, availability: ExPost, unit: Unit::Mw, derivation: Derivation::Difference { minuend: p.day_ahead, subtrahend: p.actual } });
    }
    for p in &FORECAST_PAIRS {
        out.push(FeatureSpec {
            name: p.ramp_error,
            availability: ExPost,
            unit: Unit::MwPerHour,
            derivation: Derivation::Difference { minuend: p.day_ahead_ramp, subtrahend: p.actual_ramp },
        });
    }
    out.extend(FORECAST_PAIRS.iter().map(|p| ramp(p.day_ahead_ramp, p.day_ahead, DayAhead, Unit::Mw)));
    out.push(ramp(PRICE_RAMP, PRICES, DayAhead, Unit::Price));
    for name in [HOUR, WEEKDAY, MONTH] {
        out.push(FeatureSpec { name, availability: DayAhead, unit: Unit::Calendar, derivation: Derivation::Calendar });
    }
    out
}

/// The 66 external features in a fixed order.
pub fn catalog() -> &'static [FeatureSpec] {
    static CATALOG: std::sync::OnceLock<Vec<FeatureSpec>> = std::sync::OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

pub fn feature_spec(name: &str) -> Option<&'static FeatureSpec> {
    catalog().iter().find(|f| f.name == name)
}

/// Names of the 25 input series.
pub fn base_feature_names() -> impl Iterator<Item = &'static str> {
    catalog().iter().filter(|f| f.derivation == Derivation::Base).map(|f| f.name)
}
