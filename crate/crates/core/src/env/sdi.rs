use serde::{Deserialize, Serialize};

use crate::env::Environment;

/// Stochastic double integrator: position `s[0]`, velocity `s[1]`, friction
/// `gamma`, process noise `alpha`, observation noise `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdiState {
    pub s: [f64; 2],
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// State increment over `dt`: `ds₁ = s₂ dt`, `ds₂ = (−γ s₂ + y) dt + α dW`.
pub fn sdi_dynamics(state: &SdiState, y: f64, dt: f64, dw: f64) -> [f64; 2] {
    [state.s[1] * dt, (-state.gamma * state.s[1] + y) * dt + state.alpha * dw]
}

/// Noisy observation `x = s + β ε`.
pub fn sdi_observe(state: &SdiState, eps: [f64; 2]) -> [f64; 2] {
    [state.s[0] + state.beta * eps[0], state.s[1] + state.beta * eps[1]]
}

/// `r = −½‖s‖² − ½y²`.
pub fn sdi_reward(s: [f64; 2], y: f64) -> f64 {
    -0.5 * (s[0] * s[0] + s[1] * s[1]) - 0.5 * y * y
}

/// The plant as an environment. Observation noise is an exogenous draw
/// renewed every step; process noise is one Wiener channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleIntegrator {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s0: [f64; 2],
}

impl DoubleIntegrator {
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Self {
        DoubleIntegrator { gamma, alpha, beta, s0: [0.0, 0.0] }
    }

    fn at(&self, s: &[f64]) -> SdiState {
        SdiState { s: [s[0], s[1]], gamma: self.gamma, alpha: self.alpha, beta: self.beta }
    }
}

impl Environment for DoubleIntegrator {
    fn input_dim(&self) -> usize {
        2
    }

    fn state_dim(&self) -> usize {
        2
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn exogenous_dim(&self) -> usize {
        2
    }

    fn initial_state(&self) -> Vec<f64> {
        self.s0.to_vec()
    }

    fn state_name(&self, i: usize) -> String {
        format!("s_{i}")
    }

    fn input(&self, _t: f64, state: &[f64], exo: &[f64], out: &mut [f64]) {
        let x = sdi_observe(&self.at(state), [exo[0], exo[1]]);
        out.copy_from_slice(&x);
    }

    fn reward(&self, _t: f64, state: &[f64], _x: &[f64], y: f64) -> f64 {
        sdi_reward([state[0], state[1]], y)
    }

    fn drift(&self, _t: f64, state: &[f64], _x: &[f64], y: f64, out: &mut [f64]) {
        let ds = sdi_dynamics(&self.at(state), y, 1.0, 0.0);
        out.copy_from_slice(&ds);
    }

    fn diffusion(&self, _t: f64, _state: &[f64], dw: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = self.alpha * dw[0];
    }
}
