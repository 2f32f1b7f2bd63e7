use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use crate::data::clean::{remove_outliers, OutlierStats};
use crate::data::table::{
    fill_hourly_gaps, load_weather, LoadStats, WeatherTable, FEATURE_NAMES, TEMPERATURE,
};
use crate::data::transform::{make_split, Standardizer, WhiteningTransform};
use crate::error::{Error, Result};
use crate::sde::{fmt_f64, SampledSignal};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;
pub const DEFAULT_HORIZON_ROWS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub train_fraction: f64,
    /// Forecast offset in rows (hours).
    pub horizon_rows: usize,
    pub whiten: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            train_fraction: DEFAULT_TRAIN_FRACTION,
            horizon_rows: DEFAULT_HORIZON_ROWS,
            whiten: true,
        }
    }
}

/// Rows paired with their future temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRows {
    pub timestamps: Vec<i64>,
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

/// Pairs each row with the temperature `horizon` rows later and drops the
/// final `horizon` rows, which have no target.
pub fn forecast_targets(table: &WeatherTable, horizon: usize) -> Result<ForecastRows> {
    if horizon == 0 || table.len() <= horizon {
        return Err(Error::Data(format!("{} rows cannot provide a {horizon}-row-ahead target", table.len())));
    }
    let n = table.len() - horizon;
    Ok(ForecastRows {
        timestamps: table.timestamps[..n].to_vec(),
        features: table.features[..n].iter().map(|r| r.to_vec()).collect(),
        targets: table.features[horizon..].iter().map(|r| r[TEMPERATURE]).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineStats {
    pub load: LoadStats,
    pub gap_rows_added: usize,
    pub outliers: OutlierStats,
    pub rows_with_target: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Timestamp of the first test row.
    pub split_timestamp: i64,
}

/// One split of the processed data: model inputs and standardized targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub timestamps: Vec<i64>,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Input and target signals with row `k` placed at `t = k · time_per_row`.
    pub fn signals(&self, time_per_row: f64) -> Result<(Arc<SampledSignal>, Arc<SampledSignal>)> {
        let times: Vec<f64> = (0..self.len()).map(|k| k as f64 * time_per_row).collect();
        let x = SampledSignal::new(times.clone(), self.inputs.clone())?;
        let y = SampledSignal::scalar(times, &self.targets)?;
        Ok((Arc::new(x), Arc::new(y)))
    }
}

/// The weather task after cleaning, splitting and scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherDataset {
    pub config: PipelineConfig,
    pub train: Split,
    pub test: Split,
    pub features: Standardizer,
    pub target: Standardizer,
    pub whitening: Option<WhiteningTransform>,
    pub stats: PipelineStats,
}

/// Cleans, splits and scales a loaded table. Every fitted statistic uses
/// training rows only.
pub fn prepare(table: &WeatherTable, load: LoadStats, config: &PipelineConfig) -> Result<WeatherDataset> {
    let (filled, gap_rows_added) = fill_hourly_gaps(table)?;
    let (clean, outliers) = remove_outliers(&filled)?;
    let rows = forecast_targets(&clean, config.horizon_rows)?;
    let idx: Vec<usize> = (0..rows.targets.len()).collect();
    let (train_idx, test_idx) = make_split(&idx, config.train_fraction)?;
    let pick = |ix: &[usize]| -> (Vec<i64>, Vec<Vec<f64>>, Vec<f64>) {
        (
            ix.iter().map(|&i| rows.timestamps[i]).collect(),
            ix.iter().map(|&i| rows.features[i].clone()).collect(),
            ix.iter().map(|&i| rows.targets[i]).collect(),
        )
    };
    let (train_ts, train_x, train_y) = pick(&train_idx);
    let (test_ts, test_x, test_y) = pick(&test_idx);

    let features = Standardizer::fit(&train_x)?;
    let as_rows = |v: &[f64]| v.iter().map(|y| vec![*y]).collect::<Vec<_>>();
    let target = Standardizer::fit(&as_rows(&train_y))?;
    let mut train_in = features.apply_all(&train_x);
    let mut test_in = features.apply_all(&test_x);
    let whitening = if config.whiten {
        let w = WhiteningTransform::fit(&train_in)?;
        train_in = w.apply_all(&train_in);
        test_in = w.apply_all(&test_in);
        Some(w)
    } else {
        None
    };
    let scale_y = |ys: &[f64]| ys.iter().map(|y| target.apply(&[*y])[0]).collect::<Vec<_>>();

    let stats = PipelineStats {
        load,
        gap_rows_added,
        outliers,
        rows_with_target: rows.targets.len(),
        train_rows: train_idx.len(),
        test_rows: test_idx.len(),
        split_timestamp: test_ts[0],
    };
    Ok(WeatherDataset {
        config: config.clone(),
        train: Split { timestamps: train_ts, inputs: train_in, targets: scale_y(&train_y) },
        test: Split { timestamps: test_ts, inputs: test_in, targets: scale_y(&test_y) },
        features,
        target,
        whitening,
        stats,
    })
}

pub fn prepare_file(path: &Path, config: &PipelineConfig) -> Result<WeatherDataset> {
    let (table, load) = load_weather(path)?;
    prepare(&table, load, config)
}

#[derive(Serialize)]
struct CacheManifest<'a> {
    config: &'a PipelineConfig,
    feature_names: [&'static str; 6],
    stats: &'a PipelineStats,
    feature_mean: Vec<String>,
    feature_std: Vec<String>,
    target_mean: String,
    target_std: String,
    whitening: Option<WhiteningManifest>,
}

#[derive(Serialize)]
struct WhiteningManifest {
    mean: Vec<String>,
    r: Vec<Vec<String>>,
    r_inv: Vec<Vec<String>>,
}

fn fmt_all(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| fmt_f64(*x)).collect()
}

impl WeatherDataset {
    /// Writes `weather_clean.csv` (split, timestamp, processed inputs,
    /// standardized target) and `weather_manifest.json` into `dir`. Numbers
    /// carry 17 significant digits.
    pub fn write_cache(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join("weather_clean.csv");
        let mut w = csv::Writer::from_path(&csv_path)?;
        let mut header = vec!["split".to_string(), "timestamp".to_string()];
        header.extend(FEATURE_NAMES.iter().map(|s| s.to_string()));
        header.push("target".into());
        w.write_record(&header)?;
        for (name, split) in [("train", &self.train), ("test", &self.test)] {
            for k in 0..split.len() {
                let mut rec = vec![name.to_string(), split.timestamps[k].to_string()];
                rec.extend(fmt_all(&split.inputs[k]));
                rec.push(fmt_f64(split.targets[k]));
                w.write_record(&rec)?;
            }
        }
        w.flush().map_err(|e| Error::io(&csv_path, e))?;

        let manifest = CacheManifest {
            config: &self.config,
            feature_names: FEATURE_NAMES,
            stats: &self.stats,
            feature_mean: fmt_all(&self.features.mean),
            feature_std: fmt_all(&self.features.std),
            target_mean: fmt_f64(self.target.mean[0]),
            target_std: fmt_f64(self.target.std[0]),
            whitening: self.whitening.as_ref().map(|t| WhiteningManifest {
                mean: fmt_all(&t.mean),
                r: t.r_rows().iter().map(|r| fmt_all(r)).collect(),
                r_inv: t.r_inv_rows().iter().map(|r| fmt_all(r)).collect(),
            }),
        };
        let json_path = dir.join("weather_manifest.json");
        let mut f = std::fs::File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
        serde_json::to_writer_pretty(&mut f, &manifest)?;
        f.write_all(b"\n").map_err(|e| Error::io(&json_path, e))?;
        Ok((csv_path, json_path))
    }
}
