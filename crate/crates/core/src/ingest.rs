//! Observation-file ingestion.
//!
//! The observation schema is one CSV per deployment with the header
//! `station_key,timestamp_iso8601,speed_mps,direction_deg`. Direction may
//! be blank. Rows with non-positive or non-numeric speeds or unparsable
//! timestamps are dropped and counted, never silently discarded; strict
//! mode turns any such row into a schema error instead.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};

pub const EXPECTED_HEADER: [&str; 4] = [
    "station_key",
    "timestamp_iso8601",
    "speed_mps",
    "direction_deg",
];

/// One retained observation row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub timestamp: NaiveDateTime,
    pub speed_mps: f64,
    /// Reported bearing the wind blows from; None when missing/invalid.
    pub direction_deg: Option<f64>,
}

/// Cleaned per-station time series, ordered by timestamp.
#[derive(Debug, Clone)]
pub struct ObservationSeries {
    pub station_key: String,
    pub records: Vec<Observation>,
    /// Data rows seen for this station, including dropped ones.
    pub n_raw: usize,
    /// Rows dropped for bad speed or timestamp.
    pub n_dropped: usize,
    pub period_start: Option<NaiveDateTime>,
    pub period_end: Option<NaiveDateTime>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Error out on the first malformed row instead of dropping it.
    pub strict: bool,
    /// Keep only this station's rows.
    pub station: Option<String>,
}

fn parse_timestamp(text: &str) -> Option<NaiveDateTime> {
    let text = text.trim();
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(text) {
        return Some(dt.naive_utc());
    }
    for format in [
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M:%S",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, format) {
            return Some(dt);
        }
    }
    None
}

/// Ingest one observation file, returning one series per station in
/// first-appearance order.
pub fn ingest_observations(path: &Path, options: &IngestOptions) -> Result<Vec<ObservationSeries>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ingest_reader(file, options)
}

/// Same as [`ingest_observations`] over any reader.
pub fn ingest_reader<R: Read>(
    reader: R,
    options: &IngestOptions,
) -> Result<Vec<ObservationSeries>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv_reader
        .headers()
        .map_err(|e| Error::Schema(format!("cannot read header row: {e}")))?
        .clone();
    for (i, expected) in EXPECTED_HEADER.iter().enumerate() {
        let found = headers.get(i).unwrap_or("").trim();
        if found != *expected {
            return Err(Error::Schema(format!(
                "header column {}: expected '{expected}', found '{found}'",
                i + 1
            )));
        }
    }

    // keyed groups in first-appearance order
    let mut order: Vec<String> = Vec::new();
    let mut groups: Vec<ObservationSeries> = Vec::new();

    for (row_idx, record) in csv_reader.records().enumerate() {
        let line = row_idx + 2; // 1-based, after the header
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                return Err(Error::Schema(format!("row {line}: unreadable ({e})")));
            }
        };
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let key = record.get(0).unwrap_or("").trim().to_string();
        if key.is_empty() {
            return Err(Error::Schema(format!("row {line}: empty station_key")));
        }
        if let Some(wanted) = &options.station {
            if &key != wanted {
                continue;
            }
        }
        let group_idx = match order.iter().position(|k| *k == key) {
            Some(i) => i,
            None => {
                order.push(key.clone());
                groups.push(ObservationSeries {
                    station_key: key.clone(),
                    records: Vec::new(),
                    n_raw: 0,
                    n_dropped: 0,
                    period_start: None,
                    period_end: None,
                });
                groups.len() - 1
            }
        };
        let group = &mut groups[group_idx];
        group.n_raw += 1;

        let drop = |group: &mut ObservationSeries, reason: String| -> Result<()> {
            if options.strict {
                Err(Error::Schema(format!("row {line}: {reason}")))
            } else {
                group.n_dropped += 1;
                Ok(())
            }
        };

        let timestamp = match parse_timestamp(record.get(1).unwrap_or("")) {
            Some(t) => t,
            None => {
                drop(
                    group,
                    format!("unparsable timestamp '{}'", record.get(1).unwrap_or("")),
                )?;
                continue;
            }
        };
        let speed_text = record.get(2).unwrap_or("").trim();
        let speed = match speed_text.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            _ => {
                drop(group, format!("non-numeric speed '{speed_text}'"))?;
                continue;
            }
        };
        if speed <= 0.0 {
            drop(group, format!("non-positive speed {speed}"))?;
            continue;
        }
        let dir_text = record.get(3).unwrap_or("").trim();
        let direction = if dir_text.is_empty() {
            None
        } else {
            match dir_text.parse::<f64>() {
                Ok(d) if d.is_finite() && (0.0..=360.0).contains(&d) => Some(d),
                _ if options.strict => {
                    return Err(Error::Schema(format!(
                        "row {line}: bad direction '{dir_text}'"
                    )));
                }
                // a bad direction does not invalidate the speed reading
                _ => None,
            }
        };
        group.records.push(Observation {
            timestamp,
            speed_mps: speed,
            direction_deg: direction,
        });
    }

    let mut total_retained = 0;
    for group in &mut groups {
        group.records.sort_by_key(|r| r.timestamp);
        group.period_start = group.records.first().map(|r| r.timestamp);
        group.period_end = group.records.last().map(|r| r.timestamp);
        total_retained += group.records.len();
    }
    if total_retained == 0 {
        return Err(Error::InsufficientData(match &options.station {
            Some(key) => format!("no usable rows for station '{key}'"),
            None => "no usable observation rows".to_string(),
        }));
    }
    Ok(groups)
}

impl ObservationSeries {
    pub fn speeds(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.speed_mps).collect()
    }

    /// Directions eligible for the wind rose: entries for observations at
    /// or above the calm threshold, None for calms or missing directions.
    pub fn rose_directions(&self, calm_threshold_mps: f64) -> Vec<Option<f64>> {
        self.records
            .iter()
            .map(|r| {
                if r.speed_mps < calm_threshold_mps {
                    None
                } else {
                    r.direction_deg
                }
            })
            .collect()
    }
}
