use serde::Serialize;

use crate::data::table::{WeatherTable, FEATURE_NAMES, PRESSURE};
use crate::error::{Error, Result};

/// Features screened for outliers. The bearing components are bounded by
/// construction and left alone.
const SCREENED: [usize; 4] = [0, 1, 2, PRESSURE];

/// Distance from the mean, in sample standard deviations, beyond which a
/// value counts as an outlier.
pub const OUTLIER_SIGMAS: f64 = 6.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OutlierStats {
    /// Replaced values per feature, keyed by feature name.
    pub replaced: Vec<(String, usize)>,
}

impl OutlierStats {
    pub fn total(&self) -> usize {
        self.replaced.iter().map(|(_, n)| n).sum()
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Flags for one feature column: zero pressure, then values more than six
/// sample standard deviations from the mean of the remaining values.
fn flag_outliers(col: &[f64], j: usize) -> Vec<bool> {
    let mut flags: Vec<bool> = col.iter().map(|v| j == PRESSURE && *v == 0.0).collect();
    let kept = col.iter().zip(&flags).filter(|(_, f)| !**f).map(|(v, _)| *v);
    if kept.clone().count() >= 2 {
        let (mean, std) = mean_std(kept);
        if std > 0.0 {
            for (f, v) in flags.iter_mut().zip(col) {
                if (v - mean).abs() > OUTLIER_SIGMAS * std {
                    *f = true;
                }
            }
        }
    }
    flags
}

/// Replaces flagged entries by linear interpolation between the nearest
/// valid neighbours; leading and trailing runs copy the nearest valid value.
pub fn interpolate_flagged(col: &mut [f64], flags: &[bool]) {
    let valid: Vec<usize> = (0..col.len()).filter(|&i| !flags[i]).collect();
    if valid.is_empty() {
        return;
    }
    let mut next = 0;
    for i in 0..col.len() {
        if !flags[i] {
            continue;
        }
        while next < valid.len() && valid[next] < i {
            next += 1;
        }
        let right = valid.get(next).copied();
        let left = next.checked_sub(1).map(|k| valid[k]);
        col[i] = match (left, right) {
            (Some(l), Some(r)) => {
                let w = (i - l) as f64 / (r - l) as f64;
                col[l] + w * (col[r] - col[l])
            }
            (Some(l), None) => col[l],
            (None, Some(r)) => col[r],
            (None, None) => unreachable!(),
        };
    }
}

/// Repairs outliers feature by feature. A feature with more than half of
/// its values flagged is reported as a data-quality error.
pub fn remove_outliers(table: &WeatherTable) -> Result<(WeatherTable, OutlierStats)> {
    if table.is_empty() {
        return Err(Error::Data("empty weather table".into()));
    }
    let mut out = table.clone();
    let mut stats = OutlierStats::default();
    for j in SCREENED {
        let mut col = table.column(j);
        let flags = flag_outliers(&col, j);
        let count = flags.iter().filter(|f| **f).count();
        if count * 2 > col.len() {
            return Err(Error::Data(format!(
                "feature `{}` has {count} of {} values flagged as outliers",
                FEATURE_NAMES[j],
                col.len()
            )));
        }
        interpolate_flagged(&mut col, &flags);
        for (row, v) in out.features.iter_mut().zip(col) {
            row[j] = v;
        }
        stats.replaced.push((FEATURE_NAMES[j].to_string(), count));
    }
    Ok((out, stats))
}
