//! Ornstein-Uhlenbeck adaptation (OUA): gradient-free learning in continuous
//! time.
//!
//! Parameters evolve as a mean-reverting stochastic process whose mean is
//! pulled towards rewarding excursions by a reward prediction error. The
//! crate provides the integrator ([`sde`]), the learning dynamics
//! ([`learner`]), models and task environments, the weather data pipeline
//! ([`data`]), and an experiment harness with named presets ([`harness`],
//! [`config`]).

pub mod cli;
pub mod config;
pub mod data;
pub mod env;
pub mod error;
pub mod harness;
pub mod learner;
pub mod models;
pub mod sde;

pub use error::{Error, Result};
