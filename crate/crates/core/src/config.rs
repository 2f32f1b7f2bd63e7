//! Experiment configuration: TOML files, built-in presets, `key=value`
//! overrides and validation.
//!
//! A file may name a preset with a top-level `preset = "fig2"`; its own keys
//! are then merged over that preset. Overrides are applied after the merge
//! and before validation, so `--set hyper.eta=50` behaves exactly like
//! editing the file. Bare leaf names (`eta`) are accepted when unambiguous.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::data::{PipelineConfig, DEFAULT_HORIZON_ROWS, DEFAULT_TRAIN_FRACTION};
use crate::error::{Error, Result};
use crate::learner::{Hyperparams, MetaState};
use crate::models::{Model, Nonlinearity};
use crate::sde::{TimeGrid, DEFAULT_DT};

/// Environment variable supplying seeds when neither the command line nor
/// the config names any.
pub const SEED_ENV: &str = "OUA_SEED";

/// Seeds used when nothing else specifies them: 15 seeds, 0 through 14.
pub fn default_seeds() -> Vec<u64> {
    (0..15).collect()
}

pub const PRESETS: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// Environment variable consulted for the weather CSV when the config has no
/// `task.data_path`.
pub const WEATHER_ENV: &str = "OUA_WEATHER_CSV";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// `tanh(θx)` against a teacher.
    #[default]
    Single,
    /// Continuous-time recurrent network against a recurrent teacher.
    Recurrent,
    /// `tanh(θᵀx)` on phase-shifted sines.
    Multi,
    /// Linear 24-hour-ahead temperature forecast.
    Weather,
    /// Linear feedback control of a stochastic double integrator.
    Sdi,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Single => "single",
            TaskKind::Recurrent => "recurrent",
            TaskKind::Multi => "multi",
            TaskKind::Weather => "weather",
            TaskKind::Sdi => "sdi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TaskConfig {
    pub kind: TaskKind,
    /// Teacher parameters θ*.
    pub teacher: Vec<f64>,
    /// Time at which the teacher switches to `switch_teacher`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_teacher: Option<Vec<f64>>,
    /// Input count for the multi-parameter task.
    pub n_inputs: usize,
    pub nonlinearity: Nonlinearity,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s0: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_path: Option<PathBuf>,
    /// Generate a synthetic Szeged-schema file of this many hours instead of
    /// reading real data. Zero disables it.
    pub synthetic_hours: usize,
    pub whiten: bool,
    pub train_fraction: f64,
    pub horizon_rows: usize,
    /// Simulation time spanned by one data row.
    pub time_per_row: f64,
}

impl Default for TaskConfig {
    fn default() -> Self {
        TaskConfig {
            kind: TaskKind::Single,
            teacher: vec![1.0],
            switch_time: None,
            switch_teacher: None,
            n_inputs: 6,
            nonlinearity: Nonlinearity::Tanh,
            gamma: 0.01,
            alpha: 0.005,
            beta: 0.005,
            s0: [0.0, 0.0],
            data_path: None,
            synthetic_hours: 0,
            whiten: true,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            horizon_rows: DEFAULT_HORIZON_ROWS,
            time_per_row: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t0: f64,
    /// Horizon. For the weather task it may be omitted to span the whole
    /// training split.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    pub dt: f64,
    /// Record every k-th step (the last step is always recorded).
    pub record_every: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { t0: 0.0, t_end: None, dt: DEFAULT_DT, record_every: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperConfig {
    pub lambda: f64,
    pub eta: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig { lambda: 1.0, eta: 1.0, rho: 1.0, sigma: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitConfig {
    /// θ₀; zeros when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    /// μ₀; equal to θ₀ when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    pub rbar: f64,
    pub z: f64,
    /// When positive, θ₀ is drawn per seed from `N(theta, theta_std²)`.
    pub theta_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetaConfig {
    pub enabled: bool,
    pub sigma0: f64,
    pub mu_sigma0: f64,
    pub lambda_sigma: f64,
    pub eta_sigma: f64,
    /// Diffusion of the σ process; defaults to `hyper.rho` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta_diffusion: Option<f64>,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig {
            enabled: false,
            sigma0: 0.15,
            mu_sigma0: 0.15,
            lambda_sigma: 2.0,
            eta_sigma: 3.0,
            meta_diffusion: None,
        }
    }
}

/// Seeds as a list or a compact string (`"0..14"` inclusive, `"1,4,9"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Text(String),
}

impl SeedSpec {
    pub fn resolve(&self) -> Result<Vec<u64>> {
        match self {
            SeedSpec::List(v) => Ok(v.clone()),
            SeedSpec::Text(s) => parse_seeds(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<SeedSpec>,
    /// Also run with θ frozen at θ₀.
    pub baseline: bool,
    /// Also run with θ frozen at the learned μ(T).
    pub frozen_mean: bool,
    /// With meta-learning on, also run with σ fixed at `meta.sigma0`.
    pub fixed_sigma: bool,
    pub sweep_points: usize,
    /// Ratio between the largest and smallest sweep value, centred
    /// geometrically on the configured value.
    pub sweep_span: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seeds: None,
            baseline: true,
            frozen_mean: false,
            fixed_sigma: false,
            sweep_points: 12,
            sweep_span: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub task: TaskConfig,
    pub grid: GridConfig,
    pub hyper: HyperConfig,
    pub init: InitConfig,
    pub meta: MetaConfig,
    pub run: RunConfig,
}

/// Parses `"a..b"` (inclusive), `"a"` or comma-separated lists.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::config(format!("run.seeds: cannot parse `{s}` (expected e.g. 0..14 or 1,2,3)"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|p| p.trim().parse::<u64>().map_err(|_| bad())).collect()
}

impl ExperimentConfig {
    pub fn model(&self) -> Model {
        match self.task.kind {
            TaskKind::Single => Model::TanhScalar,
            TaskKind::Recurrent => Model::Ctrnn { nonlinearity: self.task.nonlinearity },
            TaskKind::Multi => Model::TanhMulti { dim: self.task.n_inputs },
            TaskKind::Weather => Model::Linear { dim: 6 },
            TaskKind::Sdi => Model::Linear { dim: 2 },
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        let h = &self.hyper;
        Hyperparams::uniform(h.lambda, h.eta, h.rho, h.sigma, self.model().param_dim())
    }

    pub fn meta_state(&self) -> Option<MetaState> {
        self.meta.enabled.then(|| MetaState {
            sigma: self.meta.sigma0,
            mu_sigma: self.meta.mu_sigma0,
            lambda_sigma: self.meta.lambda_sigma,
            eta_sigma: self.meta.eta_sigma,
            meta_diffusion: self.meta.meta_diffusion.unwrap_or(self.hyper.rho),
        })
    }

    /// Grid with an explicit horizon; `None` for weather runs that span the
    /// data.
    pub fn time_grid(&self) -> Option<TimeGrid> {
        self.grid.t_end.map(|t_end| TimeGrid { t0: self.grid.t0, t_end, dt: self.grid.dt })
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            train_fraction: self.task.train_fraction,
            horizon_rows: self.task.horizon_rows,
            whiten: self.task.whiten,
        }
    }

    pub fn theta0(&self) -> Vec<f64> {
        self.init.theta.clone().unwrap_or_else(|| vec![0.0; self.model().param_dim()])
    }

    pub fn mu0(&self) -> Vec<f64> {
        self.init.mu.clone().unwrap_or_else(|| self.theta0())
    }

    /// Configured seeds, if any.
    pub fn seeds(&self) -> Result<Option<Vec<u64>>> {
        self.run.seeds.as_ref().map(SeedSpec::resolve).transpose()
    }

    /// Checks every constraint and reports all violations together.
    pub fn validate(&self) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                errs.push(msg);
            }
        };
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let h = &self.hyper;
        need(nonneg(h.lambda), format!("hyper.lambda: lambda must be ≥ 0 (got {})", h.lambda));
        need(nonneg(h.eta), format!("hyper.eta: eta must be ≥ 0 (got {})", h.eta));
        need(nonneg(h.rho), format!("hyper.rho: rho must be ≥ 0 (got {})", h.rho));
        need(nonneg(h.sigma), format!("hyper.sigma: sigma must be ≥ 0 (got {})", h.sigma));

        let g = &self.grid;
        need(pos(g.dt), format!("grid.dt: dt must be > 0 (got {})", g.dt));
        need(g.t0.is_finite(), format!("grid.t0: must be finite (got {})", g.t0));
        need(g.record_every >= 1, "grid.record_every: must be ≥ 1".into());
        match g.t_end {
            Some(t) => need(
                t.is_finite() && t > g.t0 && (!pos(g.dt) || (t - g.t0) / g.dt >= 1.0),
                format!("grid.t_end: must exceed t0 by at least one step (got {t})"),
            ),
            None => need(self.task.kind == TaskKind::Weather, "grid.t_end: required for this task".into()),
        }

        let model = self.model();
        let n = model.param_dim();
        let t = &self.task;
        if t.kind == TaskKind::Multi {
            need(t.n_inputs >= 1, "task.n_inputs: must be ≥ 1".into());
        }
        if matches!(t.kind, TaskKind::Single | TaskKind::Recurrent | TaskKind::Multi) {
            need(
                t.teacher.len() == n,
                format!(
                    "task.teacher: expected {n} values for the {} model, got {}",
                    model.name(),
                    t.teacher.len()
                ),
            );
            if let Some(p) = &t.switch_teacher {
                need(p.len() == n, format!("task.switch_teacher: expected {n} values, got {}", p.len()));
            }
            need(
                t.switch_time.is_some() == t.switch_teacher.is_some(),
                "task.switch_time: switch_time and switch_teacher must be given together".into(),
            );
        }
        if t.kind == TaskKind::Sdi {
            need(nonneg(t.gamma), format!("task.gamma: must be ≥ 0 (got {})", t.gamma));
            need(nonneg(t.alpha), format!("task.alpha: must be ≥ 0 (got {})", t.alpha));
            need(nonneg(t.beta), format!("task.beta: must be ≥ 0 (got {})", t.beta));
        }
        if t.kind == TaskKind::Weather {
            need(
                t.train_fraction > 0.0 && t.train_fraction < 1.0,
                format!("task.train_fraction: must lie in (0, 1) (got {})", t.train_fraction),
            );
            need(t.horizon_rows >= 1, "task.horizon_rows: must be ≥ 1".into());
            need(pos(t.time_per_row), format!("task.time_per_row: must be > 0 (got {})", t.time_per_row));
        }

        let i = &self.init;
        if let Some(th) = &i.theta {
            need(th.len() == n, format!("init.theta: expected {n} values, got {}", th.len()));
        }
        if let Some(mu) = &i.mu {
            need(mu.len() == n, format!("init.mu: expected {n} values, got {}", mu.len()));
        }
        need(i.rbar.is_finite(), "init.rbar: must be finite".into());
        need(nonneg(i.theta_std), format!("init.theta_std: must be ≥ 0 (got {})", i.theta_std));

        let m = &self.meta;
        if m.enabled {
            need(nonneg(m.sigma0), format!("meta.sigma0: must be ≥ 0 (got {})", m.sigma0));
            need(nonneg(m.lambda_sigma), format!("meta.lambda_sigma: must be ≥ 0 (got {})", m.lambda_sigma));
            need(nonneg(m.eta_sigma), format!("meta.eta_sigma: must be ≥ 0 (got {})", m.eta_sigma));
            if let Some(d) = m.meta_diffusion {
                need(nonneg(d), format!("meta.meta_diffusion: must be ≥ 0 (got {d})"));
            }
        }

        let r = &self.run;
        need(r.sweep_points >= 1, "run.sweep_points: must be ≥ 1".into());
        need(
            r.sweep_span.is_finite() && r.sweep_span >= 1.0,
            format!("run.sweep_span: must be ≥ 1 (got {})", r.sweep_span),
        );
        match self.seeds() {
            Ok(Some(s)) if s.is_empty() => errs.push("run.seeds: seed list must not be empty".into()),
            Ok(_) => {}
            Err(Error::Config(e)) => errs.extend(e),
            Err(e) => errs.push(e.to_string()),
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Built-in configuration reproducing one of the figure setups.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let mut c = ExperimentConfig { name: name.to_string(), preset: None, ..Default::default() };
    c.grid.t_end = Some(200.0);
    match name {
        "fig2" | "fig3" => {
            c.init.rbar = -1.0;
        }
        "fig4" => {
            c.task.kind = TaskKind::Recurrent;
            c.task.teacher = vec![0.3, 0.7, 1.0];
            c.hyper.eta = 50.0;
            c.hyper.sigma = 0.2;
            c.init.theta = Some(vec![0.2, 0.1, 0.5]);
            c.init.rbar = -0.1;
            c.run.frozen_mean = true;
        }
        "fig5" => {
            c.task.kind = TaskKind::Multi;
            c.task.teacher = vec![0.3, 1.1, 0.0, -0.3, -1.5, -0.4];
            c.hyper.sigma = 0.2;
            c.init.rbar = -1.0;
            c.grid.t_end = Some(1500.0);
            c.run.frozen_mean = true;
        }
        "fig6" => {
            c.task.kind = TaskKind::Weather;
            c.task.teacher = vec![];
            c.hyper.sigma = 0.05;
            c.hyper.eta = 0.1;
            c.init.theta_std = 1e-3;
            c.grid.t_end = None;
            c.grid.record_every = 20;
            c.run.frozen_mean = true;
        }
        "fig7" => {
            c.task.kind = TaskKind::Sdi;
            c.task.teacher = vec![];
            c.hyper.rho = 2.0;
            c.hyper.eta = 50.0;
            c.hyper.sigma = 0.02;
            c.grid.t_end = Some(1000.0);
            c.grid.record_every = 4;
        }
        "fig8" => {
            c.task.switch_time = Some(200.0);
            c.task.switch_teacher = Some(vec![-1.0]);
            c.grid.t_end = Some(400.0);
            c.meta.enabled = true;
            c.meta.meta_diffusion = Some(1.0);
            c.hyper.sigma = 0.15;
            c.run.baseline = false;
            c.run.fixed_sigma = true;
        }
        _ => return None,
    }
    Some(c)
}

/// Every key accepted in a config file, as dotted paths.
fn known_keys() -> Vec<String> {
    let mut keys = vec!["name".to_string(), "preset".to_string()];
    let sections: [(&str, &[&str]); 6] = [
        (
            "task",
            &[
                "kind",
                "teacher",
                "switch_time",
                "switch_teacher",
                "n_inputs",
                "nonlinearity",
                "gamma",
                "alpha",
                "beta",
                "s0",
                "data_path",
                "synthetic_hours",
                "whiten",
                "train_fraction",
                "horizon_rows",
                "time_per_row",
            ],
        ),
        ("grid", &["t0", "t_end", "dt", "record_every"]),
        ("hyper", &["lambda", "eta", "rho", "sigma"]),
        ("init", &["theta", "mu", "rbar", "z", "theta_std"]),
        ("meta", &["enabled", "sigma0", "mu_sigma0", "lambda_sigma", "eta_sigma", "meta_diffusion"]),
        ("run", &["seeds", "baseline", "frozen_mean", "fixed_sigma", "sweep_points", "sweep_span"]),
    ];
    for (s, ks) in sections {
        keys.push(s.to_string());
        keys.extend(ks.iter().map(|k| format!("{s}.{k}")));
    }
    keys
}

fn unknown_keys(table: &Table, errs: &mut Vec<String>) {
    let known = known_keys();
    for (k, v) in table {
        if !known.contains(k) {
            errs.push(format!("{k}: unknown key"));
            continue;
        }
        if let (Some(sub), true) = (v.as_table(), k != "name") {
            for kk in sub.keys() {
                let path = format!("{k}.{kk}");
                if !known.contains(&path) {
                    errs.push(format!("{path}: unknown key"));
                }
            }
        } else if ["task", "grid", "hyper", "init", "meta", "run"].contains(&k.as_str()) {
            errs.push(format!("{k}: expected a section"));
        }
    }
}

/// Resolves a possibly bare key to its dotted path.
fn resolve_key(key: &str) -> Result<String> {
    let known = known_keys();
    if known.iter().any(|k| k == key) {
        return Ok(key.to_string());
    }
    let matches: Vec<&String> =
        known.iter().filter(|k| k.rsplit_once('.').map(|(_, leaf)| leaf) == Some(key)).collect();
    match matches.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(Error::config(format!("{key}: unknown key"))),
        many => Err(Error::config(format!(
            "{key}: ambiguous key, use one of {}",
            many.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    toml::from_str::<Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies one `key=value` override to a raw table.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(format!("{assignment}: override must look like key=value")))?;
    let path = resolve_key(key.trim())?;
    let value = parse_value(raw);
    match path.split_once('.') {
        None => {
            table.insert(path, value);
        }
        Some((section, leaf)) => {
            let entry = table.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
            let sub = entry
                .as_table_mut()
                .ok_or_else(|| Error::config(format!("{section}: expected a section")))?;
            sub.insert(leaf.to_string(), value);
        }
    }
    Ok(())
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn to_table(c: &ExperimentConfig) -> Table {
    match Value::try_from(c).expect("config serialises") {
        Value::Table(t) => t,
        _ => unreachable!(),
    }
}

/// Builds a normalised config from raw TOML text plus overrides. An empty
/// document without a preset is an error; every problem found is reported.
pub fn config_from_str(text: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let mut table: Table =
        text.parse().map_err(|e: toml::de::Error| Error::config(format!("parse error: {}", e.message())))?;
    let mut errs = Vec::new();
    for o in overrides {
        if let Err(Error::Config(e)) = apply_override(&mut table, o) {
            errs.extend(e);
        }
    }
    unknown_keys(&table, &mut errs);
    let preset_name = table.get("preset").and_then(Value::as_str).map(str::to_string);
    let has_task = table.get("task").and_then(Value::as_table).is_some_and(|t| t.contains_key("kind"));
    let mut full = match &preset_name {
        Some(p) => match preset(p) {
            Some(c) => to_table(&c),
            None => {
                errs.push(format!("preset: unknown preset `{p}` (known: {})", PRESETS.join(", ")));
                Table::new()
            }
        },
        None if has_task => Table::new(),
        None => {
            errs.push("task.kind: missing (set task.kind or name a preset)".into());
            Table::new()
        }
    };
    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    merge(&mut full, table);
    let config: ExperimentConfig =
        Value::Table(full).try_into().map_err(|e: toml::de::Error| Error::config(e.message().to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Reads, merges, overrides and validates a config file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("{}: cannot read config: {e}", path.display())))?;
    config_from_str(&text, overrides)
}

/// Validates a file and returns the normalised config or the error list.
pub fn validate_config(path: &Path) -> Result<ExperimentConfig> {
    load_config(path, &[])
}

/// A preset with overrides applied, validated.
pub fn preset_with(name: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    config_from_str(&format!("preset = \"{name}\""), overrides)
}

/// Renders a config as TOML.
pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in PRESETS {
            let c = preset(p).unwrap();
            c.validate().unwrap_or_else(|e| panic!("{p}: {e}"));
            assert_eq!(preset_with(p, &[]).unwrap().name, p);
        }
        assert!(preset("fig9").is_none());
    }

    #[test]
    fn empty_file_needs_task() {
        let err = config_from_str("", &[]).unwrap_err().to_string();
        assert!(err.contains("task.kind"), "{err}");
        let c =
            config_from_str("[task]\nkind = \"multi\"\nteacher = [0,0,0,0,0,0]\n[grid]\nt_end = 10.0", &[])
                .unwrap();
        assert_eq!(c.model(), Model::TanhMulti { dim: 6 });
    }

    #[test]
    fn errors_aggregated() {
        let text = "preset = \"fig2\"\nbogus = 1\n[hyper]\nsigma = -1\nlambda = -2\n[grid]\nfoo = 3\n";
        let err = config_from_str(text, &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus: unknown key"), "{msg}");
        assert!(msg.contains("grid.foo: unknown key"), "{msg}");
        let text = "preset = \"fig2\"\n[hyper]\nsigma = -1\nlambda = -2\n";
        let msg = config_from_str(text, &[]).unwrap_err().to_string();
        assert!(msg.contains("sigma must be ≥ 0"), "{msg}");
        assert!(msg.contains("lambda must be ≥ 0"), "{msg}");
    }

    #[test]
    fn override_equals_edit() {
        let a = config_from_str("preset = \"fig2\"", &["eta=50".into()]).unwrap();
        let b = config_from_str("preset = \"fig2\"\n[hyper]\neta = 50.0\n", &[]).unwrap();
        assert_eq!(a, b);
        let c = config_from_str("preset = \"fig2\"", &["hyper.eta=50".into()]).unwrap();
        assert_eq!(a, c);
        assert!(config_from_str("preset = \"fig2\"", &["nope=1".into()]).is_err());
        // `sigma` names only hyper.sigma; meta has sigma0.
        assert!(config_from_str("preset = \"fig2\"", &["sigma=0.1".into()]).is_ok());
    }

    #[test]
    fn seeds_parse() {
        assert_eq!(parse_seeds("0..14").unwrap().len(), 15);
        assert_eq!(parse_seeds("3").unwrap(), vec![3]);
        assert_eq!(parse_seeds("1, 4,9").unwrap(), vec![1, 4, 9]);
        assert!(parse_seeds("5..2").is_err());
        assert!(parse_seeds("x").is_err());
        let c = config_from_str("preset = \"fig2\"\n[run]\nseeds = [1, 2]\n", &[]).unwrap();
        assert_eq!(c.seeds().unwrap(), Some(vec![1, 2]));
    }

    #[test]
    fn round_trip_toml() {
        for p in PRESETS {
            let c = preset(p).unwrap();
            let back = config_from_str(&to_toml(&c), &[]).unwrap();
            assert_eq!(back, c, "{p}");
        }
    }

    #[test]
    fn teacher_length_checked() {
        let msg =
            config_from_str("preset = \"fig4\"\n[task]\nteacher = [1.0]\n", &[]).unwrap_err().to_string();
        assert!(msg.contains("task.teacher"), "{msg}");
    }
}
