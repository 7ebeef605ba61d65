//! Delimited-text readers and writers for frequency traces and indicator tables.

use std::io::{Read, Write};

use chrono::{DateTime, Utc};

use super::indicators::IndicatorTable;
use super::trace::FrequencyTrace;
use super::SignalError;
use crate::time::{self, format_utc, parse_utc};

pub const TRACE_HEADER: [&str; 2] = ["timestamp_utc", "frequency_hz"];
pub const INDICATOR_HEADER: [&str; 5] = ["hour_utc", "nadir_hz", "rocof_hz_per_s", "msd_hz2", "integral_hz_s"];

pub(crate) fn parse_value(raw: &str) -> Result<Option<f64>, String> {
    let raw = raw.trim();
    if raw.is_empty() || raw.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Ok(None),
        Err(_) => Err(format!("cannot parse number {raw:?}")),
    }
}

pub(crate) fn format_value(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v}"),
        None => "nan".to_owned(),
    }
}

fn parse_error(line: u64, message: impl Into<String>) -> SignalError {
    SignalError::Parse { line, message: message.into() }
}

/// Reads `timestamp_utc,frequency_hz` rows at a 1 s cadence.
///
/// Raw readings are centered on 50 Hz. Absent seconds and `nan` cells
/// become missing samples. The trace starts at the hour containing the
/// first timestamp and ends at the last timestamp.
pub fn read_trace<R: Read>(reader: R) -> Result<FrequencyTrace, SignalError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(1, e.to_string()))?.clone();
    if headers.len() < 2 || headers[0] != *TRACE_HEADER[0] || headers[1] != *TRACE_HEADER[1] {
        return Err(parse_error(1, format!("expected header {}", TRACE_HEADER.join(","))));
    }
    let mut samples: Vec<(i64, Option<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let ts = parse_utc(&record[0]).ok_or_else(|| parse_error(line, format!("bad timestamp {:?}", &record[0])))?;
        if ts.timestamp_subsec_nanos() != 0 {
            return Err(parse_error(line, "timestamps must fall on whole seconds"));
        }
        let value = parse_value(&record[1]).map_err(|m| parse_error(line, m))?;
        if let Some(&(prev, _)) = samples.last() {
            if ts.timestamp() <= prev {
                return Err(parse_error(line, "timestamps must be strictly increasing"));
            }
        }
        samples.push((ts.timestamp(), value));
    }
    let Some(&(first, _)) = samples.first() else {
        return Err(SignalError::EmptyTrace);
    };
    let first_ts = DateTime::<Utc>::from_timestamp(first, 0).expect("parsed timestamp");
    let start = time::floor_hour(first_ts);
    let last = samples.last().unwrap().0;
    let len = (last - start.timestamp() + 1) as usize;
    let mut values = vec![f64::NAN; len];
    let mut missing = vec![true; len];
    for (ts, v) in samples {
        let idx = (ts - start.timestamp()) as usize;
        if let Some(v) = v {
            values[idx] = v - super::trace::NOMINAL_HZ;
            missing[idx] = false;
        }
    }
    FrequencyTrace::new(start, values, missing)
}

/// Writes a trace back as raw `timestamp_utc,frequency_hz` rows.
pub fn write_trace<W: Write>(trace: &FrequencyTrace, writer: W) -> Result<(), SignalError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(TRACE_HEADER)?;
    let start = trace.start();
    for (i, (v, m)) in trace.values().iter().zip(trace.missing()).enumerate() {
        let ts = start + chrono::Duration::seconds(i as i64);
        let cell = if *m { "nan".to_owned() } else { format!("{}", v + super::trace::NOMINAL_HZ) };
        wtr.write_record([format_utc(ts), cell])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_indicators<W: Write>(table: &IndicatorTable, writer: W) -> Result<(), SignalError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(INDICATOR_HEADER)?;
    for i in 0..table.len() {
        wtr.write_record([
            format_utc(table.hours[i]),
            format_value(table.nadir[i]),
            format_value(table.rocof[i]),
            format_value(table.msd[i]),
            format_value(table.integral[i]),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_indicators<R: Read>(reader: R) -> Result<IndicatorTable, SignalError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(1, e.to_string()))?.clone();
    if headers.iter().ne(INDICATOR_HEADER.iter().copied()) {
        return Err(parse_error(1, format!("expected header {}", INDICATOR_HEADER.join(","))));
    }
    let mut table = IndicatorTable { hours: vec![], nadir: vec![], rocof: vec![], msd: vec![], integral: vec![] };
    for record in rdr.records() {
        let record = record.map_err(|e| parse_error(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let ts = parse_utc(&record[0]).ok_or_else(|| parse_error(line, "bad timestamp"))?;
        let cell = |i: usize| parse_value(&record[i]).map_err(|m| parse_error(line, m));
        table.hours.push(ts);
        table.nadir.push(cell(1)?);
        table.rocof.push(cell(2)?);
        table.msd.push(cell(3)?);
        table.integral.push(cell(4)?);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{extract_indicators, ExtractOptions, RocofParams};

    #[test]
    fn absent_rows_and_nan_become_missing() {
        let csv = "timestamp_utc,frequency_hz\n\
                   2019-01-01T00:00:02Z,50.01\n\
                   2019-01-01T00:00:03Z,nan\n\
                   2019-01-01T00:00:05Z,49.98\n";
        let tr = read_trace(csv.as_bytes()).unwrap();
        assert_eq!(tr.len(), 6);
        assert_eq!(tr.missing(), &[true, true, false, true, true, false]);
        assert!((tr.values()[2] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "timestamp_utc,frequency_hz\n2019-01-01T00:00:00Z,50.0\n2019-01-01T00:00:01Z,abc\n";
        match read_trace(csv.as_bytes()) {
            Err(SignalError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indicator_table_round_trips() {
        let start = parse_utc("2019-01-01T00:00:00Z").unwrap();
        let f: Vec<f64> = (0..2 * 3600 + 1).map(|t| 0.01 * ((t as f64) / 500.0).sin()).collect();
        let tr = FrequencyTrace::from_centered(start, f).unwrap();
        let table = extract_indicators(&tr, RocofParams::new(60, 60).unwrap(), ExtractOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_indicators(&table, &mut buf).unwrap();
        let back = read_indicators(buf.as_slice()).unwrap();
        assert_eq!(back, table);
    }
}
