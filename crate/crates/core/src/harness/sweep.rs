use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::run::{Experiment, RunMode};

/// Hyper-parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Lambda,
    Sigma,
    Rho,
    Eta,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] =
        [SweepParam::Lambda, SweepParam::Sigma, SweepParam::Rho, SweepParam::Eta];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Sigma => "sigma",
            SweepParam::Rho => "rho",
            SweepParam::Eta => "eta",
        }
    }

    pub fn get(self, c: &ExperimentConfig) -> f64 {
        match self {
            SweepParam::Lambda => c.hyper.lambda,
            SweepParam::Sigma => c.hyper.sigma,
            SweepParam::Rho => c.hyper.rho,
            SweepParam::Eta => c.hyper.eta,
        }
    }

    pub fn set(self, c: &mut ExperimentConfig, v: f64) {
        match self {
            SweepParam::Lambda => c.hyper.lambda = v,
            SweepParam::Sigma => c.hyper.sigma = v,
            SweepParam::Rho => c.hyper.rho = v,
            SweepParam::Eta => c.hyper.eta = v,
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lambda" | "λ" => Ok(SweepParam::Lambda),
            "sigma" | "σ" => Ok(SweepParam::Sigma),
            "rho" | "ρ" => Ok(SweepParam::Rho),
            "eta" | "η" => Ok(SweepParam::Eta),
            other => Err(Error::config(format!(
                "param: unknown sweep parameter `{other}` (expected lambda, sigma, rho or eta)"
            ))),
        }
    }
}

/// `n` log-spaced values whose extremes differ by the factor `span`,
/// geometrically centred on `center`.
pub fn log_grid(center: f64, span: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![center];
    }
    (0..n).map(|k| center * span.powf(k as f64 / (n - 1) as f64 - 0.5)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    /// G(T) per seed; a diverged run counts as −∞.
    pub returns: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub diverged: usize,
}

impl SweepPoint {
    fn new(value: f64, returns: Vec<f64>) -> Self {
        let n = returns.len() as f64;
        SweepPoint {
            value,
            mean: returns.iter().sum::<f64>() / n,
            min: returns.iter().copied().fold(f64::INFINITY, f64::min),
            max: returns.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            diverged: returns.iter().filter(|g| **g == f64::NEG_INFINITY).count(),
            returns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub param: SweepParam,
    pub seeds: Vec<u64>,
    pub points: Vec<SweepPoint>,
    /// Mean G(T) over seeds with θ frozen at θ₀.
    pub reference: f64,
}

impl SweepResult {
    pub fn best(&self) -> &SweepPoint {
        self.points.iter().max_by(|a, b| a.mean.total_cmp(&b.mean)).expect("non-empty sweep")
    }
}

/// Mean and spread of G(T) over `seeds` for each value of `param`, plus the
/// no-learning reference. All (value, seed) pairs run concurrently and the
/// output keeps the order of `values`.
pub fn sweep(
    config: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    seeds: &[u64],
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::config("sweep: empty value list"));
    }
    if seeds.is_empty() {
        return Err(Error::config("run.seeds: seed list must not be empty"));
    }
    let experiments: Vec<Experiment> = values
        .iter()
        .map(|&v| {
            let mut c = config.clone();
            param.set(&mut c, v);
            Experiment::new(c)
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, u64)> =
        (0..values.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let returns: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, s)| experiments[i].final_return(s, RunMode::Learning).unwrap_or(f64::NEG_INFINITY))
        .collect();
    let reference: Vec<f64> = seeds
        .par_iter()
        .map(|&s| experiments[0].final_return(s, RunMode::FrozenInitial))
        .collect::<Result<_>>()?;
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &v)| SweepPoint::new(v, returns[i * seeds.len()..(i + 1) * seeds.len()].to_vec()))
        .collect();
    Ok(SweepResult {
        param,
        seeds: seeds.to_vec(),
        points,
        reference: reference.iter().sum::<f64>() / reference.len() as f64,
    })
}

/// The default grid of `config.run` around the configured value.
pub fn default_values(config: &ExperimentConfig, param: SweepParam) -> Vec<f64> {
    log_grid(param.get(config), config.run.sweep_span, config.run.sweep_points)
}
