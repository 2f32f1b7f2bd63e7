//! Synthetic hourly weather in the Szeged CSV schema.
//!
//! The generator exists so the pipeline and the weather experiment can run
//! without the real dataset. Its numbers are not real observations and no
//! result obtained on them says anything about the real task.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, FixedOffset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

const HEADER: &str = "Formatted Date,Summary,Precip Type,Temperature (C),Apparent Temperature (C),Humidity,Wind Speed (km/h),Wind Bearing (degrees),Visibility (km),Loud Cover,Pressure (millibars),Daily Summary";

/// 2006-01-01 00:00 UTC.
const START: i64 = 1_136_073_600;

#[derive(Debug, Clone)]
pub struct SyntheticWeather {
    pub hours: usize,
    pub seed: u64,
    /// Fraction of rows whose pressure is written as 0.
    pub zero_pressure_rate: f64,
}

impl Default for SyntheticWeather {
    fn default() -> Self {
        SyntheticWeather { hours: 24 * 365 * 2, seed: 0, zero_pressure_rate: 0.01 }
    }
}

impl SyntheticWeather {
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let tz = FixedOffset::east_opt(3600).expect("valid offset");
        let mut n = || -> f64 { StandardNormal.sample(&mut rng) };
        let (mut weather, mut wind, mut press) = (0.0f64, 0.0f64, 0.0f64);
        let mut bearing = 180.0f64;
        let mut rows = Vec::with_capacity(self.hours);
        for k in 0..self.hours {
            let h = k as f64;
            // Slow synoptic anomaly shared by temperature, humidity and pressure.
            weather = 0.985 * weather + 0.35 * n();
            wind = 0.9 * wind + 0.5 * n();
            press = 0.97 * press + 0.4 * n();
            bearing = (bearing + 15.0 * n()).rem_euclid(360.0);
            let season = -(2.0 * PI * (h - 24.0 * 15.0) / (24.0 * 365.25)).cos();
            let day = -(2.0 * PI * (h - 3.0) / 24.0).cos();
            let temp = 12.0 + 11.0 * season + 4.0 * day + 2.5 * weather + 0.8 * n();
            let humid = (0.72 - 0.12 * day - 0.05 * weather + 0.05 * n()).clamp(0.1, 1.0);
            let speed = (10.0 + 3.0 * wind + 2.0 * n()).max(0.0);
            let pressure = 1016.0 - 4.0 * weather + 3.0 * press - 3.0 * season;
            let noise = [n(), n()];
            rows.push((k, temp, humid, speed, bearing, pressure, noise));
        }
        writeln!(w, "{HEADER}")?;
        for (k, temp, humid, speed, bearing, pressure, noise) in rows {
            let stamp = DateTime::from_timestamp(START + 3600 * k as i64, 0)
                .expect("timestamp in range")
                .with_timezone(&tz)
                .format("%Y-%m-%d %H:%M:%S%.3f %z");
            let pressure = if rng.random::<f64>() < self.zero_pressure_rate { 0.0 } else { pressure };
            writeln!(
                w,
                "{stamp},Partly Cloudy,rain,{temp:.4},{:.4},{humid:.2},{speed:.4},{:.0},{:.4},0,{pressure:.2},Synthetic.",
                temp - 1.0 + 0.1 * noise[0],
                bearing,
                10.0 + noise[1].abs(),
            )?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(f);
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::table::{parse_weather, HOUR, PRESSURE};

    #[test]
    fn parses_with_schema() {
        let mut buf = Vec::new();
        SyntheticWeather { hours: 500, seed: 1, zero_pressure_rate: 0.05 }.write(&mut buf).unwrap();
        let (t, stats) = parse_weather(buf.as_slice()).unwrap();
        assert_eq!(t.len(), 500);
        assert_eq!(stats.rows_unparseable, 0);
        assert!(t.timestamps.windows(2).all(|w| w[1] - w[0] == HOUR));
        assert!(t.column(PRESSURE).contains(&0.0));
    }

    #[test]
    fn seeded() {
        let gen = |seed| {
            let mut buf = Vec::new();
            SyntheticWeather { hours: 50, seed, ..Default::default() }.write(&mut buf).unwrap();
            buf
        };
        assert_eq!(gen(3), gen(3));
        assert_ne!(gen(3), gen(4));
    }
}
