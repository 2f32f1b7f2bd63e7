use std::io::Read;
use std::path::Path;

use chrono::DateTime;
use serde::Serialize;

use crate::error::{Error, Result};

pub const HOUR: i64 = 3600;

/// Regressor names, in column order of [`WeatherTable::features`].
pub const FEATURE_NAMES: [&str; 6] =
    ["temperature", "humidity", "wind_speed", "wind_sin", "wind_cos", "pressure"];

pub const TEMPERATURE: usize = 0;
pub const PRESSURE: usize = 5;

/// Source columns of the public Szeged hourly weather export.
pub const COL_DATE: &str = "Formatted Date";
pub const COL_TEMPERATURE: &str = "Temperature (C)";
pub const COL_HUMIDITY: &str = "Humidity";
pub const COL_WIND_SPEED: &str = "Wind Speed (km/h)";
pub const COL_WIND_BEARING: &str = "Wind Bearing (degrees)";
pub const COL_PRESSURE: &str = "Pressure (millibars)";

const DATE_FORMAT: &str = "%Y-%m-%d %H:%M:%S%.f %z";

/// Hourly weather observations, one feature row per timestamp (unix
/// seconds, UTC).
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherTable {
    pub timestamps: Vec<i64>,
    pub features: Vec<[f64; 6]>,
}

impl WeatherTable {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[j]).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadStats {
    pub rows_read: usize,
    pub rows_unparseable: usize,
    pub duplicates_dropped: usize,
}

/// Bearing in degrees to `(sin, cos)`.
pub fn bearing_components(degrees: f64) -> (f64, f64) {
    degrees.to_radians().sin_cos()
}

pub fn parse_timestamp(s: &str) -> Option<i64> {
    DateTime::parse_from_str(s.trim(), DATE_FORMAT).ok().map(|d| d.timestamp())
}

/// Reads the weather CSV at `path`. See [`parse_weather`].
pub fn load_weather(path: &Path) -> Result<(WeatherTable, LoadStats)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_weather(file)
}

/// Parses the CSV, sorts rows chronologically and keeps the first row of
/// any duplicated timestamp. Up to 1% of rows may fail to parse; they are
/// skipped and counted.
pub fn parse_weather<R: Read>(reader: R) -> Result<(WeatherTable, LoadStats)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let cols = [
        find(COL_DATE)?,
        find(COL_TEMPERATURE)?,
        find(COL_HUMIDITY)?,
        find(COL_WIND_SPEED)?,
        find(COL_WIND_BEARING)?,
        find(COL_PRESSURE)?,
    ];

    let mut stats = LoadStats::default();
    let mut rows: Vec<(i64, usize, [f64; 6])> = Vec::new();
    for (order, record) in rdr.records().enumerate() {
        stats.rows_read += 1;
        let parsed = record.ok().and_then(|rec| {
            let field = |i: usize| rec.get(cols[i]).map(str::trim);
            let num = |i: usize| field(i)?.parse::<f64>().ok().filter(|v| v.is_finite());
            let ts = parse_timestamp(field(0)?)?;
            let (sin, cos) = bearing_components(num(4)?);
            Some((ts, order, [num(1)?, num(2)?, num(3)?, sin, cos, num(5)?]))
        });
        match parsed {
            Some(row) => rows.push(row),
            None => stats.rows_unparseable += 1,
        }
    }
    if stats.rows_read == 0 {
        return Err(Error::Data("weather file contains no data rows".into()));
    }
    if stats.rows_unparseable * 100 > stats.rows_read {
        return Err(Error::Data(format!(
            "{} of {} rows unparseable (limit 1%)",
            stats.rows_unparseable, stats.rows_read
        )));
    }

    rows.sort_by_key(|(ts, order, _)| (*ts, *order));
    let before = rows.len();
    rows.dedup_by_key(|(ts, _, _)| *ts);
    stats.duplicates_dropped = before - rows.len();

    Ok((
        WeatherTable {
            timestamps: rows.iter().map(|r| r.0).collect(),
            features: rows.into_iter().map(|r| r.2).collect(),
        },
        stats,
    ))
}

/// Inserts linearly interpolated rows for missing hours so that consecutive
/// timestamps are exactly one hour apart. Interpolated bearing components
/// are renormalised to the unit circle. Returns the number of rows added.
pub fn fill_hourly_gaps(table: &WeatherTable) -> Result<(WeatherTable, usize)> {
    if table.is_empty() {
        return Err(Error::Data("empty weather table".into()));
    }
    let mut out = WeatherTable { timestamps: vec![table.timestamps[0]], features: vec![table.features[0]] };
    let mut added = 0;
    for k in 1..table.len() {
        let (t0, t1) = (table.timestamps[k - 1], table.timestamps[k]);
        let gap = t1 - t0;
        if gap % HOUR != 0 {
            return Err(Error::Data(format!(
                "timestamp {t1} is not on the hourly grid of the preceding row"
            )));
        }
        let hours = gap / HOUR;
        let (a, b) = (table.features[k - 1], table.features[k]);
        for h in 1..hours {
            let w = h as f64 / hours as f64;
            let mut row = [0.0; 6];
            for j in 0..6 {
                row[j] = a[j] + w * (b[j] - a[j]);
            }
            let norm = row[3].hypot(row[4]);
            if norm > 0.0 {
                row[3] /= norm;
                row[4] /= norm;
            } else {
                row[3] = a[3];
                row[4] = a[4];
            }
            out.timestamps.push(t0 + h * HOUR);
            out.features.push(row);
            added += 1;
        }
        out.timestamps.push(t1);
        out.features.push(b);
    }
    Ok((out, added))
}
