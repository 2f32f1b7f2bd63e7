//! Command-line front end. [`execute`] maps a parsed invocation to harness
//! calls and an exit status: 0 success, 1 configuration error, 2 data error,
//! 3 numerical failure.

use std::path::{Path, PathBuf};

use chrono::Utc;
use clap::{Args, Parser, Subcommand};

use crate::config::{
    default_seeds, load_config, parse_seeds, preset_with, to_toml, ExperimentConfig, TaskKind, SEED_ENV,
};
use crate::data::{prepare_file, PipelineConfig};
use crate::error::{Error, Result};
use crate::harness::{
    default_values, mean, sweep, write_experiment, write_sweep, Experiment, ExperimentResult, SweepParam,
};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "oua", version, about = "Ornstein-Uhlenbeck adaptation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment for every seed, with its baselines.
    Run(Common),
    /// Sweep one hyper-parameter and report G(T) per value and seed.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// lambda, sigma, rho or eta.
        #[arg(long)]
        param: String,
        /// Comma-separated values; defaults to a log grid around the
        /// configured value.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Weather forecasting (defaults to the fig6 preset).
    Weather {
        #[command(flatten)]
        common: Common,
        /// Szeged weather CSV.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Use this many hours of synthetic weather instead of real data.
        #[arg(long)]
        synthetic: Option<usize>,
    },
    /// Stochastic double integrator control (defaults to the fig7 preset).
    Sdi(Common),
    /// Meta-learning of σ (defaults to the fig8 preset).
    Meta(Common),
    /// Load and clean a weather CSV, writing the cleaned cache and manifest.
    ValidateData {
        /// Szeged weather CSV.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "./results")]
        output_dir: PathBuf,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        whiten: bool,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in preset (fig2 ... fig8), used when no config file is given.
    #[arg(long)]
    pub preset: Option<String>,
    /// Seeds, e.g. `0..14` or `1,5,9`.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Override a config key, e.g. `--set hyper.eta=50`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, default_value = "./results")]
    pub output_dir: PathBuf,
    /// Print the normalised config and exit without running.
    #[arg(long)]
    pub dry_run: bool,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::NonFinite { .. } => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

fn resolve_config(common: &Common, fallback: Option<&str>) -> Result<ExperimentConfig> {
    match (&common.config, &common.preset, fallback) {
        (Some(path), _, _) => load_config(path, &common.overrides),
        (None, Some(p), _) => preset_with(p, &common.overrides),
        (None, None, Some(p)) => preset_with(p, &common.overrides),
        (None, None, None) => Err(Error::config("config: pass --config FILE or --preset NAME")),
    }
}

/// `--seeds`, then the config, then `OUA_SEED`, then 0..14.
pub fn resolve_seeds(cli: Option<&str>, config: &ExperimentConfig) -> Result<Vec<u64>> {
    if let Some(s) = cli {
        return parse_seeds(s);
    }
    if let Some(s) = config.seeds()? {
        return Ok(s);
    }
    if let Ok(s) = std::env::var(SEED_ENV) {
        return parse_seeds(&s);
    }
    Ok(default_seeds())
}

fn expect_kind(config: &ExperimentConfig, kinds: &[TaskKind], command: &str) -> Result<()> {
    if kinds.contains(&config.task.kind) {
        Ok(())
    } else {
        Err(Error::config(format!("task.kind: `{}` cannot be run by `{command}`", config.task.kind.name())))
    }
}

/// Outcome of a successful invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub line: String,
    pub code: i32,
}

fn summary_line(res: &ExperimentResult) -> String {
    let mut line = format!(
        "task={} seeds={} mean_G_T={:.6}",
        res.config.task.kind.name(),
        res.seeds.len(),
        mean(&res.learning_returns())
    );
    if !res.baseline.is_empty() {
        let b: Vec<f64> = res.baseline.iter().map(|r| r.summary.g_final).collect();
        line += &format!(" baseline_G_T={:.6}", mean(&b));
    }
    if !res.fixed_sigma.is_empty() {
        let b: Vec<f64> = res.fixed_sigma.iter().map(|r| r.summary.g_final).collect();
        line += &format!(" fixed_sigma_G_T={:.6}", mean(&b));
    }
    if !res.weather.is_empty() {
        let p: Vec<f64> = res.weather.iter().map(|w| w.pearson).collect();
        let m: Vec<f64> = res.weather.iter().map(|w| w.mse).collect();
        line += &format!(" test_pearson={:.4} test_mse={:.4}", mean(&p), mean(&m));
    }
    if !res.failures.is_empty() {
        line += &format!(" failed_runs={}", res.failures.len());
    }
    line
}

fn run_and_write(config: ExperimentConfig, common: &Common, argv: &[String]) -> Result<Outcome> {
    let seeds = resolve_seeds(common.seeds.as_deref(), &config)?;
    if common.dry_run {
        return Ok(Outcome { line: to_toml(&config), code: 0 });
    }
    let started = Utc::now();
    let exp = Experiment::new(config)?;
    let res = exp.run_all(&seeds);
    write_experiment(&common.output_dir, &res, argv, started)?;
    let code = if res.failures.iter().any(|f| f.numerical) {
        EXIT_NUMERICAL
    } else if res.failures.is_empty() {
        0
    } else {
        EXIT_DATA
    };
    Ok(Outcome { line: summary_line(&res), code })
}

/// Executes a parsed command. `argv` is echoed into the manifest.
pub fn execute(cli: Cli, argv: &[String]) -> Result<Outcome> {
    match cli.command {
        Command::Run(common) => {
            let config = resolve_config(&common, None)?;
            run_and_write(config, &common, argv)
        }
        Command::Sdi(common) => {
            let config = resolve_config(&common, Some("fig7"))?;
            expect_kind(&config, &[TaskKind::Sdi], "sdi")?;
            run_and_write(config, &common, argv)
        }
        Command::Meta(common) => {
            let config = resolve_config(&common, Some("fig8"))?;
            if !config.meta.enabled {
                return Err(Error::config("meta.enabled: must be true for `meta`"));
            }
            run_and_write(config, &common, argv)
        }
        Command::Weather { mut common, data, synthetic } => {
            if let Some(p) = data {
                common.overrides.push(format!("task.data_path=\"{}\"", p.display()));
            }
            if let Some(h) = synthetic {
                common.overrides.push(format!("task.synthetic_hours={h}"));
            }
            let config = resolve_config(&common, Some("fig6"))?;
            expect_kind(&config, &[TaskKind::Weather], "weather")?;
            run_and_write(config, &common, argv)
        }
        Command::Sweep { common, param, values } => {
            let config = resolve_config(&common, None)?;
            let param: SweepParam = param.parse()?;
            let seeds = resolve_seeds(common.seeds.as_deref(), &config)?;
            let values = if values.is_empty() { default_values(&config, param) } else { values };
            if common.dry_run {
                return Ok(Outcome { line: to_toml(&config), code: 0 });
            }
            let started = Utc::now();
            let result = sweep(&config, param, &values, &seeds)?;
            write_sweep(&common.output_dir, &config, &result, argv, started)?;
            let best = result.best();
            Ok(Outcome {
                line: format!(
                    "task={} seeds={} sweep={} points={} best_value={} best_mean_G_T={:.6} reference_G_T={:.6}",
                    config.task.kind.name(),
                    seeds.len(),
                    param.name(),
                    result.points.len(),
                    best.value,
                    best.mean,
                    result.reference
                ),
                code: 0,
            })
        }
        Command::ValidateData { data, output_dir, whiten } => validate_data(&data, &output_dir, whiten),
    }
}

fn validate_data(data: &Path, output_dir: &Path, whiten: bool) -> Result<Outcome> {
    let config = PipelineConfig { whiten, ..Default::default() };
    let ds = prepare_file(data, &config)?;
    ds.write_cache(output_dir)?;
    let s = &ds.stats;
    Ok(Outcome {
        line: format!(
            "rows_read={} unparseable={} duplicates={} gap_rows={} outliers={} train={} test={}",
            s.load.rows_read,
            s.load.rows_unparseable,
            s.load.duplicates_dropped,
            s.gap_rows_added,
            s.outliers.total(),
            s.train_rows,
            s.test_rows
        ),
        code: 0,
    })
}

/// Parses `argv`, runs, prints, and returns the process exit status.
pub fn main_with_args(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, &argv) {
        Ok(out) => {
            println!("{}", out.line);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
