//! Task environments: input signals, targets, rewards and, for the double
//! integrator, plant dynamics coupled to the learner.

mod sdi;
mod supervised;

pub use sdi::{sdi_dynamics, sdi_observe, sdi_reward, DoubleIntegrator, SdiState};
pub use supervised::{sine_input, tracking_reward, InputSignal, SupervisedTask, TargetSource};

/// Everything a learner needs from the world.
///
/// An environment may own state (a teacher's latent, the plant position and
/// velocity). That state is integrated as part of the composed system, so all
/// methods receive it explicitly rather than mutating `self`.
pub trait Environment: Send + Sync {
    fn input_dim(&self) -> usize;

    fn state_dim(&self) -> usize {
        0
    }

    /// Wiener components driving the environment state.
    fn noise_dim(&self) -> usize {
        0
    }

    /// Standard-normal draws resampled once per step.
    fn exogenous_dim(&self) -> usize {
        0
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; self.state_dim()]
    }

    fn state_name(&self, i: usize) -> String {
        format!("env{i}")
    }

    /// Input `x(t)` presented to the model.
    fn input(&self, t: f64, state: &[f64], exo: &[f64], out: &mut [f64]);

    /// Desired output, when the task has one.
    fn target(&self, _t: f64, _state: &[f64], _x: &[f64]) -> Option<f64> {
        None
    }

    fn reward(&self, t: f64, state: &[f64], x: &[f64], y: f64) -> f64;

    /// Environment state derivative given the model output `y`.
    fn drift(&self, _t: f64, _state: &[f64], _x: &[f64], _y: f64, _out: &mut [f64]) {}

    /// Writes `g · dW` for the environment state.
    fn diffusion(&self, _t: f64, _state: &[f64], _dw: &[f64], _out: &mut [f64]) {}
}
