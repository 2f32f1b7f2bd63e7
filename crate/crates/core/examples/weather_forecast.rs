//! Forecasting temperature 24 hours ahead from six standardized, whitened
//! weather features with a linear model.
//!
//! cargo run --release --example weather_forecast [weather.csv]
//!
//! Without a path (or OUA_WEATHER_CSV) the example generates two years of
//! SYNTHETIC weather with the Szeged schema. Numbers obtained that way say
//! nothing about real forecasting skill.

use std::sync::Arc;

use oua::config::{preset, WEATHER_ENV};
use oua::data::{parse_weather, prepare, prepare_file, SyntheticWeather};
use oua::harness::{Experiment, RunMode};

fn main() -> oua::Result<()> {
    let path = std::env::args().nth(1).or_else(|| std::env::var(WEATHER_ENV).ok());
    let mut config = preset("fig6").expect("preset");
    let pipeline = config.pipeline();
    let dataset = match &path {
        Some(p) => {
            println!("data: {p}");
            prepare_file(p.as_ref(), &pipeline)?
        }
        None => {
            println!("data: SYNTHETIC (no CSV given)");
            let mut buf = Vec::new();
            SyntheticWeather::default().write(&mut buf).expect("in-memory write");
            let (table, load) = parse_weather(buf.as_slice())?;
            prepare(&table, load, &pipeline)?
        }
    };
    let s = &dataset.stats;
    println!(
        "rows {} (+{} gap fills, {} outliers replaced), train {} / test {}",
        s.load.rows_read,
        s.gap_rows_added,
        s.outliers.total(),
        s.train_rows,
        s.test_rows
    );

    config.run.baseline = false;
    let exp = Experiment::with_dataset(config, Arc::new(dataset))?;
    let record = exp.run(0, RunMode::Learning)?;
    let eval = exp.evaluate_weather(&record)?;
    println!("coefficients (standardized feature space): {:?}", eval.coefficients);
    println!("test: pearson {:.3}, mse {:.3} (at θ₀: mse {:.3})", eval.pearson, eval.mse, eval.mse_initial);
    Ok(())
}
