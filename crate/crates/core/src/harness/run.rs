use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, TaskKind, WEATHER_ENV};
use crate::data::{parse_weather, prepare, prepare_file, project_back, SyntheticWeather, WeatherDataset};
use crate::env::{DoubleIntegrator, Environment, InputSignal, SupervisedTask, TargetSource};
use crate::error::{Error, Result};
use crate::harness::metrics::{mse, pearson, tail_rate, window_mean};
use crate::learner::{learner_as_sde, Hyperparams, InitialConditions, LearnerSystem, Mode};
use crate::models::Model;
use crate::sde::{fmt_f64, integrate_observed, RecordPolicy, TimeGrid, Trajectory, WienerSource};

/// Which variant of an experiment a run belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    Learning,
    /// θ held at θ₀ with no exploration noise.
    FrozenInitial,
    /// θ held at the given learned mean.
    FrozenMean(Vec<f64>),
    /// Learning with the meta-learned σ replaced by the constant `meta.sigma0`.
    FixedSigma,
}

impl RunMode {
    pub fn label(&self) -> &'static str {
        match self {
            RunMode::Learning => "learning",
            RunMode::FrozenInitial => "baseline",
            RunMode::FrozenMean(_) => "frozen_mean",
            RunMode::FixedSigma => "fixed_sigma",
        }
    }
}

/// The task environment chosen by the config.
#[derive(Debug, Clone)]
pub enum TaskEnv {
    Supervised(SupervisedTask),
    Sdi(DoubleIntegrator),
}

macro_rules! delegate {
    ($self:ident, $e:ident => $body:expr) => {
        match $self {
            TaskEnv::Supervised($e) => $body,
            TaskEnv::Sdi($e) => $body,
        }
    };
}

impl Environment for TaskEnv {
    fn input_dim(&self) -> usize {
        delegate!(self, e => e.input_dim())
    }
    fn state_dim(&self) -> usize {
        delegate!(self, e => e.state_dim())
    }
    fn noise_dim(&self) -> usize {
        delegate!(self, e => e.noise_dim())
    }
    fn exogenous_dim(&self) -> usize {
        delegate!(self, e => e.exogenous_dim())
    }
    fn initial_state(&self) -> Vec<f64> {
        delegate!(self, e => e.initial_state())
    }
    fn state_name(&self, i: usize) -> String {
        delegate!(self, e => e.state_name(i))
    }
    fn input(&self, t: f64, state: &[f64], exo: &[f64], out: &mut [f64]) {
        delegate!(self, e => e.input(t, state, exo, out))
    }
    fn target(&self, t: f64, state: &[f64], x: &[f64]) -> Option<f64> {
        delegate!(self, e => e.target(t, state, x))
    }
    fn reward(&self, t: f64, state: &[f64], x: &[f64], y: f64) -> f64 {
        delegate!(self, e => e.reward(t, state, x, y))
    }
    fn drift(&self, t: f64, state: &[f64], x: &[f64], y: f64, out: &mut [f64]) {
        delegate!(self, e => e.drift(t, state, x, y, out))
    }
    fn diffusion(&self, t: f64, state: &[f64], dw: &[f64], out: &mut [f64]) {
        delegate!(self, e => e.diffusion(t, state, dw, out))
    }
}

/// Scalar results of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub mode: String,
    pub g_final: f64,
    pub theta0: Vec<f64>,
    pub theta_final: Vec<f64>,
    pub mu_final: Vec<f64>,
    pub sigma_final: Option<f64>,
    pub wall_time_s: f64,
    pub metrics: BTreeMap<String, f64>,
}

/// Recorded trajectory plus per-step model output, target, reward and RPE.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub task: String,
    pub trajectory: Trajectory,
    pub output: Vec<f64>,
    pub target: Vec<Option<f64>>,
    pub reward: Vec<f64>,
    pub delta_r: Vec<f64>,
    pub summary: RunSummary,
}

impl RunRecord {
    pub fn times(&self) -> &[f64] {
        &self.trajectory.times
    }

    /// Recorded values of the named state component (`theta_0`, `mu_1`,
    /// `rbar`, `G`, `sigma`, `s_0`, ...).
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.trajectory.names.iter().position(|n| n == name)?;
        Some(self.trajectory.component(i))
    }

    pub fn file_name(&self) -> String {
        match self.summary.mode.as_str() {
            "learning" => format!("run_{}_{}.csv", self.task, self.summary.seed),
            m => format!("run_{}_{}_{m}.csv", self.task, self.summary.seed),
        }
    }

    /// CSV with `t`, every state component, then `y`, `y_star`, `r`,
    /// `delta_r`. A missing target is written as an empty field.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend(self.trajectory.names.iter().cloned());
        header.extend(["y", "y_star", "r", "delta_r"].map(String::from));
        w.write_record(&header)?;
        for k in 0..self.trajectory.len() {
            let mut rec = vec![fmt_f64(self.trajectory.times[k])];
            rec.extend(self.trajectory.states[k].iter().map(|v| fmt_f64(*v)));
            rec.push(fmt_f64(self.output[k]));
            rec.push(self.target[k].map(fmt_f64).unwrap_or_default());
            rec.push(fmt_f64(self.reward[k]));
            rec.push(fmt_f64(self.delta_r[k]));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<run csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Test-set evaluation of the weather forecast with θ = μ(T).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeatherEval {
    pub seed: u64,
    pub whitened: bool,
    pub pearson: f64,
    pub mse: f64,
    pub pearson_initial: Option<f64>,
    pub mse_initial: f64,
    /// μ(T) mapped to coefficients on the standardized features.
    pub coefficients: Vec<f64>,
    pub predictions: Vec<f64>,
    pub predictions_initial: Vec<f64>,
    pub targets: Vec<f64>,
    pub timestamps: Vec<i64>,
}

/// A configured experiment ready to run for any seed.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    model: Model,
    env: TaskEnv,
    grid: TimeGrid,
    dataset: Option<Arc<WeatherDataset>>,
}

fn load_dataset(config: &ExperimentConfig) -> Result<WeatherDataset> {
    let pipeline = config.pipeline();
    if let Some(path) = &config.task.data_path {
        return prepare_file(path, &pipeline);
    }
    if config.task.synthetic_hours > 0 {
        let mut buf = Vec::new();
        SyntheticWeather { hours: config.task.synthetic_hours, ..Default::default() }
            .write(&mut buf)
            .map_err(|e| Error::io("<synthetic weather>", e))?;
        let (table, load) = parse_weather(buf.as_slice())?;
        return prepare(&table, load, &pipeline);
    }
    if let Some(path) = std::env::var_os(WEATHER_ENV) {
        return prepare_file(Path::new(&path), &pipeline);
    }
    Err(Error::Data(format!(
        "no weather data: set task.data_path or {WEATHER_ENV}, or task.synthetic_hours for synthetic data"
    )))
}

impl Experiment {
    /// Validates `config` and builds the environment, loading the weather
    /// data when the task needs it.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let dataset =
            if config.task.kind == TaskKind::Weather { Some(Arc::new(load_dataset(&config)?)) } else { None };
        Self::build(config, dataset)
    }

    /// Like [`Experiment::new`] with an already prepared weather dataset.
    pub fn with_dataset(config: ExperimentConfig, dataset: Arc<WeatherDataset>) -> Result<Self> {
        config.validate()?;
        Self::build(config, Some(dataset))
    }

    fn build(config: ExperimentConfig, dataset: Option<Arc<WeatherDataset>>) -> Result<Self> {
        let model = config.model();
        let t = &config.task;
        let switch = t.switch_time.zip(t.switch_teacher.clone());
        let (env, grid) = match t.kind {
            TaskKind::Single | TaskKind::Recurrent | TaskKind::Multi => {
                let task = SupervisedTask::teacher(model.clone(), t.teacher.clone(), switch)?
                    .with_latent_start(config.init.z);
                (TaskEnv::Supervised(task), config.time_grid().expect("validated"))
            }
            TaskKind::Sdi => {
                let mut plant = DoubleIntegrator::new(t.gamma, t.alpha, t.beta);
                plant.s0 = t.s0;
                (TaskEnv::Sdi(plant), config.time_grid().expect("validated"))
            }
            TaskKind::Weather => {
                let data =
                    dataset.as_ref().ok_or_else(|| Error::Data("weather task without dataset".into()))?;
                let (x, y) = data.train.signals(t.time_per_row)?;
                let span = x.end() - x.start();
                let grid = match config.time_grid() {
                    Some(g) if g.t_end - g.t0 <= span + 1e-9 => g,
                    Some(g) => {
                        return Err(Error::Data(format!(
                            "grid.t_end = {} exceeds the training data span {span}",
                            g.t_end
                        )))
                    }
                    None => TimeGrid::new(0.0, span, config.grid.dt)?,
                };
                let task =
                    SupervisedTask::new(model.clone(), InputSignal::Sampled(x), TargetSource::Sampled(y))?;
                (TaskEnv::Supervised(task), grid)
            }
        };
        grid.validate()?;
        Ok(Experiment { config, model, env, grid, dataset })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn dataset(&self) -> Option<&Arc<WeatherDataset>> {
        self.dataset.as_ref()
    }

    pub fn task_name(&self) -> &'static str {
        self.config.task.kind.name()
    }

    /// θ₀ for `seed`: the configured value plus, when `init.theta_std > 0`,
    /// Gaussian jitter from a dedicated substream.
    pub fn theta0(&self, seed: u64) -> Vec<f64> {
        let mut theta = self.config.theta0();
        if self.config.init.theta_std > 0.0 {
            let mut src = WienerSource::substream(seed, theta.len(), 1);
            let mut z = vec![0.0; theta.len()];
            src.standard_normals(&mut z);
            for (t, e) in theta.iter_mut().zip(z) {
                *t += self.config.init.theta_std * e;
            }
        }
        theta
    }

    fn mu0(&self, theta0: &[f64]) -> Vec<f64> {
        match &self.config.init.mu {
            Some(mu) => mu.clone(),
            None => theta0.to_vec(),
        }
    }

    fn system(&self, mode: &RunMode) -> Result<LearnerSystem<TaskEnv>> {
        let hp: Hyperparams = match mode {
            RunMode::FixedSigma => Hyperparams::uniform(
                self.config.hyper.lambda,
                self.config.hyper.eta,
                self.config.hyper.rho,
                self.config.meta.sigma0,
                self.model.param_dim(),
            ),
            _ => self.config.hyperparams(),
        };
        let meta = match mode {
            RunMode::FixedSigma => None,
            _ => self.config.meta_state(),
        };
        let m = match mode {
            RunMode::Learning | RunMode::FixedSigma => Mode::Learning,
            RunMode::FrozenInitial | RunMode::FrozenMean(_) => Mode::Frozen,
        };
        learner_as_sde(self.model.clone(), self.env.clone(), hp, meta, m)
    }

    /// Integrates one run. The Wiener stream depends only on the seed, so
    /// frozen and learning runs of the same seed share environment noise.
    pub fn run(&self, seed: u64, mode: RunMode) -> Result<RunRecord> {
        self.run_recorded(seed, mode, RecordPolicy::every(self.config.grid.record_every))
    }

    /// Runs recording only the first and last instant.
    pub fn final_return(&self, seed: u64, mode: RunMode) -> Result<f64> {
        let steps = self.grid.steps().max(1);
        let rec = self.run_recorded(seed, mode, RecordPolicy::every(steps))?;
        Ok(rec.summary.g_final)
    }

    pub fn run_recorded(&self, seed: u64, mode: RunMode, policy: RecordPolicy) -> Result<RunRecord> {
        let start = Instant::now();
        let system = self.system(&mode)?;
        let theta0 = self.theta0(seed);
        let (theta, mu) = match &mode {
            RunMode::FrozenMean(m) => (m.clone(), m.clone()),
            _ => (theta0.clone(), self.mu0(&theta0)),
        };
        let z = vec![self.config.init.z; self.model.latent_dim()];
        let init = InitialConditions { theta, mu, rbar: self.config.init.rbar, z };
        let y0 = system.initial_state(&init)?;
        let mut noise = WienerSource::new(seed, system.layout().noise_dim());
        let mut output = Vec::new();
        let mut target = Vec::new();
        let mut reward = Vec::new();
        let mut delta_r = Vec::new();
        let trajectory = integrate_observed(
            &system,
            &self.grid,
            &y0,
            &mut noise,
            policy,
            &mut |_: usize, t: f64, y: &[f64], exo: &[f64]| {
                let s = system.snapshot(t, y, exo);
                output.push(s.output);
                target.push(s.target);
                reward.push(s.reward);
                delta_r.push(s.delta_r);
            },
        )?;

        let l = system.layout();
        let last = trajectory.last().expect("at least one record");
        let mut summary = RunSummary {
            seed,
            mode: mode.label().to_string(),
            g_final: last[l.ret()],
            theta0,
            theta_final: last[l.theta_range()].to_vec(),
            mu_final: last[l.mu_range()].to_vec(),
            sigma_final: l.sigma().map(|k| last[k]),
            wall_time_s: 0.0,
            metrics: BTreeMap::new(),
        };
        let times = &trajectory.times;
        let abs_delta: Vec<f64> = delta_r.iter().map(|d| d.abs()).collect();
        let g = trajectory.component(l.ret());
        let m = &mut summary.metrics;
        m.insert("abs_delta_r_first10".into(), window_mean(times, &abs_delta, 0.0, 0.1));
        m.insert("abs_delta_r_last10".into(), window_mean(times, &abs_delta, 0.9, 1.0));
        m.insert("reward_rate".into(), summary.g_final / (self.grid.t_end - self.grid.t0));
        m.insert("reward_rate_last10".into(), tail_rate(times, &g, 0.9));
        if matches!(self.env, TaskEnv::Sdi(_)) {
            let norm: Vec<f64> = trajectory.states.iter().map(|y| y[0].hypot(y[1])).collect();
            m.insert("norm_s_last10".into(), window_mean(times, &norm, 0.9, 1.0));
        }
        summary.wall_time_s = start.elapsed().as_secs_f64();
        Ok(RunRecord {
            task: self.task_name().to_string(),
            trajectory,
            output,
            target,
            reward,
            delta_r,
            summary,
        })
    }

    /// Test-set forecast with θ = μ(T) from `record`.
    pub fn evaluate_weather(&self, record: &RunRecord) -> Result<WeatherEval> {
        let data = self.dataset.as_ref().ok_or_else(|| Error::Data("not a weather experiment".into()))?;
        let mu = &record.summary.mu_final;
        let theta0 = &record.summary.theta0;
        let predict = |p: &[f64]| -> Vec<f64> {
            data.test.inputs.iter().map(|x| self.model.output(p, x, &[])).collect()
        };
        let predictions = predict(mu);
        let predictions_initial = predict(theta0);
        let targets = data.test.targets.clone();
        let coefficients = match &data.whitening {
            Some(w) => project_back(mu, w)?,
            None => mu.clone(),
        };
        Ok(WeatherEval {
            seed: record.summary.seed,
            whitened: data.whitening.is_some(),
            pearson: pearson(&predictions, &targets)?,
            mse: mse(&predictions, &targets)?,
            pearson_initial: pearson(&predictions_initial, &targets).ok(),
            mse_initial: mse(&predictions_initial, &targets)?,
            coefficients,
            predictions,
            predictions_initial,
            targets,
            timestamps: data.test.timestamps.clone(),
        })
    }
}

/// A run that ended in an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub seed: u64,
    pub mode: String,
    pub error: String,
    /// The underlying error was a non-finite state.
    pub numerical: bool,
}

/// All runs of an experiment over a seed list, in seed order.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub learning: Vec<RunRecord>,
    pub baseline: Vec<RunRecord>,
    pub frozen_mean: Vec<RunRecord>,
    pub fixed_sigma: Vec<RunRecord>,
    pub weather: Vec<WeatherEval>,
    pub failures: Vec<RunFailure>,
}

impl ExperimentResult {
    pub fn records(&self) -> impl Iterator<Item = &RunRecord> {
        self.learning.iter().chain(&self.baseline).chain(&self.frozen_mean).chain(&self.fixed_sigma)
    }

    pub fn learning_returns(&self) -> Vec<f64> {
        self.learning.iter().map(|r| r.summary.g_final).collect()
    }

    /// Mean G(T) of the learning runs that finished.
    pub fn mean_return(&self) -> f64 {
        let g = self.learning_returns();
        g.iter().sum::<f64>() / g.len() as f64
    }
}

#[derive(Default)]
struct SeedOutcome {
    learning: Option<RunRecord>,
    baseline: Option<RunRecord>,
    frozen_mean: Option<RunRecord>,
    fixed_sigma: Option<RunRecord>,
    weather: Option<WeatherEval>,
    failures: Vec<RunFailure>,
}

fn failure(seed: u64, mode: &RunMode, e: &Error) -> RunFailure {
    RunFailure {
        seed,
        mode: mode.label().to_string(),
        error: e.to_string(),
        numerical: matches!(e, Error::NonFinite { .. }),
    }
}

impl Experiment {
    fn run_seed(&self, seed: u64) -> SeedOutcome {
        let mut out = SeedOutcome::default();
        let attempt = |mode: RunMode, out: &mut SeedOutcome| match self.run(seed, mode.clone()) {
            Ok(r) => Some(r),
            Err(e) => {
                out.failures.push(failure(seed, &mode, &e));
                None
            }
        };
        out.learning = attempt(RunMode::Learning, &mut out);
        if self.config.run.baseline {
            out.baseline = attempt(RunMode::FrozenInitial, &mut out);
        }
        if self.config.run.frozen_mean {
            if let Some(mu) = out.learning.as_ref().map(|r| r.summary.mu_final.clone()) {
                out.frozen_mean = attempt(RunMode::FrozenMean(mu), &mut out);
            }
        }
        if self.config.run.fixed_sigma && self.config.meta.enabled {
            out.fixed_sigma = attempt(RunMode::FixedSigma, &mut out);
        }
        if self.dataset.is_some() {
            if let Some(rec) = &out.learning {
                match self.evaluate_weather(rec) {
                    Ok(w) => out.weather = Some(w),
                    Err(e) => out.failures.push(failure(seed, &RunMode::Learning, &e)),
                }
            }
        }
        out
    }

    /// Runs every variant enabled in the config for each seed, in parallel.
    /// Results are ordered by seed regardless of scheduling.
    pub fn run_all(&self, seeds: &[u64]) -> ExperimentResult {
        let outcomes: Vec<SeedOutcome> = seeds.par_iter().map(|&s| self.run_seed(s)).collect();
        let mut res = ExperimentResult {
            config: self.config.clone(),
            seeds: seeds.to_vec(),
            learning: vec![],
            baseline: vec![],
            frozen_mean: vec![],
            fixed_sigma: vec![],
            weather: vec![],
            failures: vec![],
        };
        for o in outcomes {
            res.learning.extend(o.learning);
            res.baseline.extend(o.baseline);
            res.frozen_mean.extend(o.frozen_mean);
            res.fixed_sigma.extend(o.fixed_sigma);
            res.weather.extend(o.weather);
            res.failures.extend(o.failures);
        }
        res
    }
}

/// Builds and runs `config` for `seeds`.
pub fn run_experiment(config: ExperimentConfig, seeds: &[u64]) -> Result<ExperimentResult> {
    if seeds.is_empty() {
        return Err(Error::config("run.seeds: seed list must not be empty"));
    }
    Ok(Experiment::new(config)?.run_all(seeds))
}
