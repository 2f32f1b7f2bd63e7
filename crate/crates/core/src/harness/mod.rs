//! Experiment orchestration: multi-seed runs with baselines, frozen-mean
//! evaluation, hyper-parameter sweeps, metrics and result files.

pub mod metrics;
pub mod output;
pub mod run;
pub mod sweep;

pub use metrics::{mean, median, mse, pearson, tail_rate, window_mean};
pub use output::{
    write_experiment, write_summary, write_sweep, write_weather_predictions, Manifest, VERSION,
};
pub use run::{
    run_experiment, Experiment, ExperimentResult, RunFailure, RunMode, RunRecord, RunSummary, TaskEnv,
    WeatherEval,
};
pub use sweep::{default_values, log_grid, sweep, SweepParam, SweepPoint, SweepResult};
