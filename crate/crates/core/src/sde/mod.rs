//! Fixed-step stochastic integration.
//!
//! Systems implement [`SdeSystem`]; [`integrate`] advances them with the
//! Euler-Heun scheme on a [`TimeGrid`], drawing increments from a seeded
//! [`WienerSource`]. Data-driven inputs are interpolated with
//! [`SampledSignal`].

mod grid;
mod hermite;
mod noise;
mod solver;

pub use grid::{TimeGrid, DEFAULT_DT};
pub use hermite::{hermite_interpolate, SampledSignal};
pub use noise::WienerSource;
pub use solver::{
    euler_heun_step, fmt_f64, integrate, integrate_observed, DiagonalSde, EulerHeun, RecordPolicy, SdeSystem,
    StepObserver, Trajectory,
};
