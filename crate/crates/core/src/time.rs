//! UTC timestamp parsing and formatting shared by all delimited tables.

use chrono::{DateTime, NaiveDateTime, TimeZone, Timelike, Utc};

pub const HOUR_SECONDS: i64 = 3600;

/// Parses `2019-01-01T00:00:00Z`, `2019-01-01T00:00:00+00:00` or
/// `2019-01-01 00:00:00` (taken as UTC).
pub fn parse_utc(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(Utc.from_utc_datetime(&naive));
        }
    }
    None
}

pub fn format_utc(ts: DateTime<Utc>) -> String {
    ts.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn is_hour_aligned(ts: DateTime<Utc>) -> bool {
    ts.minute() == 0 && ts.second() == 0 && ts.nanosecond() == 0
}

/// Largest hour boundary not after `ts`.
pub fn floor_hour(ts: DateTime<Utc>) -> DateTime<Utc> {
    let secs = ts.timestamp().div_euclid(HOUR_SECONDS) * HOUR_SECONDS;
    Utc.timestamp_opt(secs, 0).single().expect("in range")
}

pub fn add_hours(ts: DateTime<Utc>, hours: i64) -> DateTime<Utc> {
    ts + chrono::Duration::hours(hours)
}
