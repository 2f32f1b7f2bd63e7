//! Weather forecasting data: loading, cleaning, 24-hour-ahead targets,
//! chronological split, standardization and ZCA whitening.

pub mod clean;
pub mod pipeline;
pub mod synth;
pub mod table;
pub mod transform;

pub use clean::{interpolate_flagged, remove_outliers, OutlierStats, OUTLIER_SIGMAS};
pub use pipeline::{
    forecast_targets, prepare, prepare_file, ForecastRows, PipelineConfig, PipelineStats, Split,
    WeatherDataset, DEFAULT_HORIZON_ROWS, DEFAULT_TRAIN_FRACTION,
};
pub use synth::SyntheticWeather;
pub use table::{
    bearing_components, fill_hourly_gaps, load_weather, parse_weather, LoadStats, WeatherTable,
    FEATURE_NAMES, HOUR, PRESSURE, TEMPERATURE,
};
pub use transform::{
    covariance, make_split, project_back, zca_whiten, Standardizer, WhiteningTransform, RIDGE,
};
