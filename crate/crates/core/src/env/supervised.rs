use std::f64::consts::PI;
use std::sync::Arc;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::sde::SampledSignal;

/// `x_i(t) = sin(0.1·i·t + (i−1)·2π/n)` for `1 ≤ i ≤ n`.
pub fn sine_input(i: usize, n: usize, t: f64) -> f64 {
    debug_assert!(i >= 1 && i <= n);
    (0.1 * i as f64 * t + (i - 1) as f64 * 2.0 * PI / n as f64).sin()
}

/// `r = −(y − y*)²`.
pub fn tracking_reward(y: f64, y_star: f64) -> f64 {
    -(y - y_star).powi(2)
}

#[derive(Debug, Clone)]
pub enum InputSignal {
    /// Phase-shifted sines of increasing frequency.
    Sines { n: usize },
    /// Recorded data, interpolated between samples.
    Sampled(Arc<SampledSignal>),
}

impl InputSignal {
    pub fn dim(&self) -> usize {
        match self {
            InputSignal::Sines { n } => *n,
            InputSignal::Sampled(s) => s.dim(),
        }
    }

    fn eval(&self, t: f64, out: &mut [f64]) {
        match self {
            InputSignal::Sines { n } => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = sine_input(i + 1, *n, t);
                }
            }
            // The grid is validated against the signal range before a run
            // starts; clamping only absorbs rounding at the final instant.
            InputSignal::Sampled(s) => {
                let t = t.clamp(s.start(), s.end());
                s.interpolate_into(t, out).expect("time clamped into signal range");
            }
        }
    }
}

/// Where the desired output comes from.
#[derive(Debug, Clone)]
pub enum TargetSource {
    /// The task model evaluated at fixed parameters, optionally switching to
    /// new parameters at `switch_time`.
    Teacher { params: Vec<f64>, switch: Option<(f64, Vec<f64>)> },
    /// Recorded targets aligned with a sampled input.
    Sampled(Arc<SampledSignal>),
}

/// Supervised tracking task with reward `−(y − y*)²`.
///
/// With a teacher target the environment runs the teacher's own latent state
/// (for recurrent models), starting from the same `z₀` as the learner.
#[derive(Debug, Clone)]
pub struct SupervisedTask {
    model: Model,
    input: InputSignal,
    target: TargetSource,
    z0: f64,
}

impl SupervisedTask {
    pub fn new(model: Model, input: InputSignal, target: TargetSource) -> Result<Self> {
        if input.dim() != model.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "task input",
                expected: model.input_dim(),
                actual: input.dim(),
            });
        }
        match &target {
            TargetSource::Teacher { params, switch } => {
                model.check_params(params)?;
                if let Some((_, p)) = switch {
                    model.check_params(p)?;
                }
            }
            TargetSource::Sampled(s) => {
                if s.dim() != 1 {
                    return Err(Error::DimensionMismatch {
                        context: "target signal",
                        expected: 1,
                        actual: s.dim(),
                    });
                }
            }
        }
        Ok(SupervisedTask { model, input, target, z0: 0.0 })
    }

    /// Teacher task driven by sine inputs, the setup of the synthetic
    /// experiments.
    pub fn teacher(model: Model, params: Vec<f64>, switch: Option<(f64, Vec<f64>)>) -> Result<Self> {
        let n = model.input_dim();
        Self::new(model, InputSignal::Sines { n }, TargetSource::Teacher { params, switch })
    }

    pub fn with_latent_start(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn input_signal(&self) -> &InputSignal {
        &self.input
    }

    fn teacher_params(&self, t: f64) -> Option<&[f64]> {
        match &self.target {
            TargetSource::Teacher { params, switch } => match switch {
                Some((ts, p)) if t >= *ts => Some(p),
                _ => Some(params),
            },
            TargetSource::Sampled(_) => None,
        }
    }

    fn has_teacher_latent(&self) -> bool {
        matches!(self.target, TargetSource::Teacher { .. }) && self.model.latent_dim() > 0
    }
}

impl Environment for SupervisedTask {
    fn input_dim(&self) -> usize {
        self.input.dim()
    }

    fn state_dim(&self) -> usize {
        if self.has_teacher_latent() {
            self.model.latent_dim()
        } else {
            0
        }
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![self.z0; self.state_dim()]
    }

    fn state_name(&self, i: usize) -> String {
        format!("z_star_{i}")
    }

    fn input(&self, t: f64, _state: &[f64], _exo: &[f64], out: &mut [f64]) {
        self.input.eval(t, out);
    }

    fn target(&self, t: f64, state: &[f64], x: &[f64]) -> Option<f64> {
        match &self.target {
            TargetSource::Sampled(s) => {
                let t = t.clamp(s.start(), s.end());
                let mut out = [0.0];
                s.interpolate_into(t, &mut out).ok()?;
                Some(out[0])
            }
            TargetSource::Teacher { .. } => {
                let params = self.teacher_params(t)?;
                Some(self.model.output(params, x, state))
            }
        }
    }

    fn reward(&self, t: f64, state: &[f64], x: &[f64], y: f64) -> f64 {
        let y_star = self.target(t, state, x).unwrap_or(0.0);
        tracking_reward(y, y_star)
    }

    fn drift(&self, t: f64, state: &[f64], x: &[f64], _y: f64, out: &mut [f64]) {
        if let Some(params) = self.teacher_params(t) {
            if !state.is_empty() {
                self.model.latent_drift(params, x, state, out);
            }
        }
    }
}
