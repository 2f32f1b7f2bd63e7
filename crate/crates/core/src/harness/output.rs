use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::config::{to_toml, ExperimentConfig};
use crate::error::{Error, Result};
use crate::harness::run::{ExperimentResult, RunFailure, RunRecord, WeatherEval};
use crate::harness::sweep::SweepResult;
use crate::sde::fmt_f64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Enough to reproduce an invocation exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: Vec<String>,
    pub started: String,
    pub finished: String,
    pub seeds: Vec<u64>,
    pub config: ExperimentConfig,
    pub config_toml: String,
    pub files: Vec<String>,
    pub failures: Vec<RunFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, seeds: &[u64], command: &[String], started: DateTime<Utc>) -> Self {
        Manifest {
            version: VERSION.to_string(),
            command: command.to_vec(),
            started: started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            seeds: seeds.to_vec(),
            config: config.clone(),
            config_toml: to_toml(config),
            files: vec![],
            failures: vec![],
            summary: None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn name_of(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Writes `summary.csv`: one row per run with seed, mode, G(T), final μ,
/// final σ and the run metrics.
pub fn write_summary(path: &Path, records: &[&RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let n = records.iter().map(|r| r.summary.mu_final.len()).max().unwrap_or(0);
    let mut metric_names: Vec<String> =
        records.iter().flat_map(|r| r.summary.metrics.keys().cloned()).collect();
    metric_names.sort();
    metric_names.dedup();
    let mut header = vec!["task".to_string(), "seed".into(), "mode".into(), "G_T".into()];
    header.extend((0..n).map(|i| format!("mu_{i}")));
    header.push("sigma_T".into());
    header.extend(metric_names.iter().cloned());
    header.push("wall_time_s".into());
    w.write_record(&header)?;
    for r in records {
        let s = &r.summary;
        let mut rec = vec![r.task.clone(), s.seed.to_string(), s.mode.clone(), fmt_f64(s.g_final)];
        rec.extend((0..n).map(|i| s.mu_final.get(i).map(|v| fmt_f64(*v)).unwrap_or_default()));
        rec.push(s.sigma_final.map(fmt_f64).unwrap_or_default());
        rec.extend(metric_names.iter().map(|m| s.metrics.get(m).map(|v| fmt_f64(*v)).unwrap_or_default()));
        rec.push(format!("{:.6}", s.wall_time_s));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Test-set predictions of one weather evaluation.
pub fn write_weather_predictions(path: &Path, eval: &WeatherEval) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["timestamp", "target", "prediction", "prediction_initial"])?;
    for k in 0..eval.targets.len() {
        w.write_record([
            eval.timestamps[k].to_string(),
            fmt_f64(eval.targets[k]),
            fmt_f64(eval.predictions[k]),
            fmt_f64(eval.predictions_initial[k]),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes run CSVs, `summary.csv`, weather outputs and `manifest.json` into
/// `dir`. Returns the manifest as written.
pub fn write_experiment(
    dir: &Path,
    result: &ExperimentResult,
    command: &[String],
    started: DateTime<Utc>,
) -> Result<Manifest> {
    create_dir(dir)?;
    let mut files = Vec::new();
    for r in result.records() {
        let p = dir.join(r.file_name());
        r.save_csv(&p)?;
        files.push(name_of(&p));
    }
    let records: Vec<&RunRecord> = result.records().collect();
    let summary = dir.join("summary.csv");
    write_summary(&summary, &records)?;
    files.push(name_of(&summary));
    for eval in &result.weather {
        let p = dir.join(format!("weather_test_{}.csv", eval.seed));
        write_weather_predictions(&p, eval)?;
        files.push(name_of(&p));
    }
    let mut manifest = Manifest::new(&result.config, &result.seeds, command, started);
    manifest.files = files;
    manifest.failures = result.failures.clone();
    if !result.weather.is_empty() {
        let metrics: Vec<_> = result
            .weather
            .iter()
            .map(|w| {
                serde_json::json!({
                    "seed": w.seed,
                    "whitened": w.whitened,
                    "pearson": w.pearson,
                    "mse": w.mse,
                    "mse_initial": w.mse_initial,
                    "coefficients": w.coefficients,
                })
            })
            .collect();
        manifest.summary = Some(serde_json::json!({ "weather": metrics }));
    }
    manifest.write(dir)?;
    Ok(manifest)
}

/// Writes `sweep.csv` (value, seed, G_T), `sweep_summary.csv` and
/// `manifest.json`.
pub fn write_sweep(
    dir: &Path,
    config: &ExperimentConfig,
    sweep: &SweepResult,
    command: &[String],
    started: DateTime<Utc>,
) -> Result<Manifest> {
    create_dir(dir)?;
    let path = dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["value", "seed", "G_T"])?;
    for p in &sweep.points {
        for (s, g) in sweep.seeds.iter().zip(&p.returns) {
            w.write_record([fmt_f64(p.value), s.to_string(), fmt_f64(*g)])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let spath = dir.join("sweep_summary.csv");
    let mut w = csv::Writer::from_path(&spath)?;
    w.write_record(["param", "value", "mean_G_T", "min_G_T", "max_G_T", "diverged", "reference_G_T"])?;
    for p in &sweep.points {
        w.write_record([
            sweep.param.name().to_string(),
            fmt_f64(p.value),
            fmt_f64(p.mean),
            fmt_f64(p.min),
            fmt_f64(p.max),
            p.diverged.to_string(),
            fmt_f64(sweep.reference),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&spath, e))?;

    let mut manifest = Manifest::new(config, &sweep.seeds, command, started);
    manifest.files = vec![name_of(&path), name_of(&spath)];
    manifest.summary = Some(serde_json::json!({
        "param": sweep.param.name(),
        "values": sweep.points.iter().map(|p| p.value).collect::<Vec<_>>(),
        "reference": sweep.reference,
    }));
    manifest.write(dir)?;
    Ok(manifest)
}
