//! Ornstein-Uhlenbeck adaptation.
//!
//! Parameters `θ` follow an OU process around a mean `μ`; the mean drifts
//! towards recent parameter excursions in proportion to the reward
//! prediction error `δ_r = r − r̄`, where `r̄` is a low-pass filtered reward.
//! The return `G` integrates the reward. Optionally the diffusion magnitude
//! `σ` follows the same scheme one level up.
//!
//! [`learner_as_sde`] stacks model latent, learning variables and environment
//! state into one [`SdeSystem`] that is advanced with a single solver call
//! per step.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::models::Model;
use crate::sde::SdeSystem;

/// Lower clamp applied to a learned `σ` before it is used as a diffusion
/// magnitude.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Mean-reversion rate λ.
    pub lambda: f64,
    /// Learning rate η.
    pub eta: f64,
    /// Reward-filter rate ρ.
    pub rho: f64,
    /// Per-parameter diffusion σᵢ.
    pub sigma: Vec<f64>,
}

impl Hyperparams {
    /// Same σ for every one of `n` parameters.
    pub fn uniform(lambda: f64, eta: f64, rho: f64, sigma: f64, n: usize) -> Self {
        Hyperparams { lambda, eta, rho, sigma: vec![sigma; n] }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for (name, v) in [("lambda", self.lambda), ("eta", self.eta), ("rho", self.rho)] {
            if !(v.is_finite() && v >= 0.0) {
                errs.push(format!("{name} must be ≥ 0 (got {v})"));
            }
        }
        if self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            errs.push(format!("sigma must be ≥ 0 (got {:?})", self.sigma));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Learning variables at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pub theta: Vec<f64>,
    pub mu: Vec<f64>,
    pub rbar: f64,
    /// Return G.
    pub ret: f64,
}

impl LearnerState {
    pub fn new(theta: Vec<f64>, mu: Vec<f64>, rbar: f64) -> Result<Self> {
        if theta.len() != mu.len() {
            return Err(Error::DimensionMismatch {
                context: "learner mean",
                expected: theta.len(),
                actual: mu.len(),
            });
        }
        Ok(LearnerState { theta, mu, rbar, ret: 0.0 })
    }
}

/// Learnable diffusion magnitude and its own adaptation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaState {
    pub sigma: f64,
    pub mu_sigma: f64,
    pub lambda_sigma: f64,
    pub eta_sigma: f64,
    /// Diffusion magnitude of the σ process.
    pub meta_diffusion: f64,
}

/// Drifts and diffusion for the σ process at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaDynamics {
    pub sigma_drift: f64,
    pub sigma_diffusion: f64,
    pub mu_sigma_drift: f64,
    /// σ as used for the parameter diffusion.
    pub effective_sigma: f64,
}

pub fn rpe(r: f64, rbar: f64) -> f64 {
    r - rbar
}

/// `dr̄/dt = ρ (r − r̄)`.
pub fn rbar_drift(r: f64, rbar: f64, rho: f64) -> f64 {
    rho * (r - rbar)
}

/// Returns the drift `λ(μ − θ)` and the diffusion diagonal `σ`.
pub fn theta_dynamics(state: &LearnerState, hp: &Hyperparams) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(state, hp)?;
    let drift = state.mu.iter().zip(&state.theta).map(|(m, t)| hp.lambda * (m - t)).collect();
    Ok((drift, hp.sigma.clone()))
}

/// `dμ/dt = η δ_r (θ − μ)`.
pub fn mu_drift(state: &LearnerState, hp: &Hyperparams, delta_r: f64) -> Result<Vec<f64>> {
    check_dims(state, hp)?;
    Ok(state.theta.iter().zip(&state.mu).map(|(t, m)| hp.eta * delta_r * (t - m)).collect())
}

fn check_dims(state: &LearnerState, hp: &Hyperparams) -> Result<()> {
    for (context, len) in [("learner mean", state.mu.len()), ("diffusion", hp.sigma.len())] {
        if len != state.theta.len() {
            return Err(Error::DimensionMismatch { context, expected: state.theta.len(), actual: len });
        }
    }
    Ok(())
}

/// Stationary covariance `ΣΣᵀ / 2λ` of the parameter process at fixed mean.
pub fn stationary_covariance(hp: &Hyperparams) -> Result<DMatrix<f64>> {
    if hp.lambda == 0.0 {
        return Err(Error::NoStationaryState);
    }
    let diag: Vec<f64> = hp.sigma.iter().map(|s| s * s / (2.0 * hp.lambda)).collect();
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
}

pub fn meta_sigma_dynamics(meta: &MetaState, delta_r: f64) -> MetaDynamics {
    MetaDynamics {
        sigma_drift: meta.lambda_sigma * (meta.mu_sigma - meta.sigma),
        sigma_diffusion: meta.meta_diffusion,
        mu_sigma_drift: meta.eta_sigma * delta_r * (meta.sigma - meta.mu_sigma),
        effective_sigma: meta.sigma.max(SIGMA_FLOOR),
    }
}

/// Whether the learning variables move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Learning,
    /// θ, μ (and σ, μ^σ) held at their initial values with no exploration
    /// noise; only the model, environment, r̄ and G evolve.
    Frozen,
}

/// Index map of the stacked state vector
/// `[env | z | θ | μ | r̄ | G | σ μ^σ]` and of the Wiener vector
/// `[θ | σ | env]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub env: usize,
    pub latent: usize,
    pub params: usize,
    pub meta: bool,
    pub env_noise: usize,
}

impl Layout {
    pub fn env_range(&self) -> std::ops::Range<usize> {
        0..self.env
    }

    pub fn latent_range(&self) -> std::ops::Range<usize> {
        self.env..self.env + self.latent
    }

    pub fn theta_range(&self) -> std::ops::Range<usize> {
        let s = self.env + self.latent;
        s..s + self.params
    }

    pub fn mu_range(&self) -> std::ops::Range<usize> {
        let s = self.env + self.latent + self.params;
        s..s + self.params
    }

    pub fn rbar(&self) -> usize {
        self.env + self.latent + 2 * self.params
    }

    pub fn ret(&self) -> usize {
        self.rbar() + 1
    }

    pub fn sigma(&self) -> Option<usize> {
        self.meta.then(|| self.ret() + 1)
    }

    pub fn mu_sigma(&self) -> Option<usize> {
        self.meta.then(|| self.ret() + 2)
    }

    /// Size of the learner block `z, θ, μ, r̄, G [, σ, μ^σ]`.
    pub fn learner_dim(&self) -> usize {
        self.latent + 2 * self.params + 2 + if self.meta { 2 } else { 0 }
    }

    /// Wiener components driving the learner block.
    pub fn learner_noise_dim(&self) -> usize {
        self.params + usize::from(self.meta)
    }

    pub fn state_dim(&self) -> usize {
        self.env + self.learner_dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.learner_noise_dim() + self.env_noise
    }

    fn env_noise_range(&self) -> std::ops::Range<usize> {
        let s = self.learner_noise_dim();
        s..s + self.env_noise
    }
}

/// Initial values of the stacked state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub theta: Vec<f64>,
    pub mu: Vec<f64>,
    pub rbar: f64,
    pub z: Vec<f64>,
}

/// Model, environment and learning dynamics as one stacked system.
#[derive(Debug, Clone)]
pub struct LearnerSystem<E> {
    model: Model,
    env: E,
    hp: Hyperparams,
    meta: Option<MetaState>,
    mode: Mode,
    layout: Layout,
}

/// Quantities derived from the state at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub input: Vec<f64>,
    pub output: f64,
    pub target: Option<f64>,
    pub reward: f64,
    pub delta_r: f64,
}

/// Composes the learner for `model` with `env`.
pub fn learner_as_sde<E: Environment>(
    model: Model,
    env: E,
    hp: Hyperparams,
    meta: Option<MetaState>,
    mode: Mode,
) -> Result<LearnerSystem<E>> {
    hp.validate()?;
    let n = model.param_dim();
    if hp.sigma.len() != n {
        return Err(Error::DimensionMismatch {
            context: "diffusion coefficients",
            expected: n,
            actual: hp.sigma.len(),
        });
    }
    if env.input_dim() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "environment input",
            expected: model.input_dim(),
            actual: env.input_dim(),
        });
    }
    let layout = Layout {
        env: env.state_dim(),
        latent: model.latent_dim(),
        params: n,
        meta: meta.is_some(),
        env_noise: env.noise_dim(),
    };
    Ok(LearnerSystem { model, env, hp, meta, mode, layout })
}

impl<E: Environment> LearnerSystem<E> {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn env(&self) -> &E {
        &self.env
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Stacked initial state; the environment supplies its own part and the
    /// return starts at zero.
    pub fn initial_state(&self, init: &InitialConditions) -> Result<Vec<f64>> {
        let l = self.layout;
        self.model.check_params(&init.theta)?;
        self.model.check_params(&init.mu)?;
        let mut y = vec![0.0; l.state_dim()];
        let env0 = self.env.initial_state();
        if env0.len() != l.env {
            return Err(Error::DimensionMismatch {
                context: "environment state",
                expected: l.env,
                actual: env0.len(),
            });
        }
        y[l.env_range()].copy_from_slice(&env0);
        if !init.z.is_empty() {
            if init.z.len() != l.latent {
                return Err(Error::DimensionMismatch {
                    context: "latent state",
                    expected: l.latent,
                    actual: init.z.len(),
                });
            }
            y[l.latent_range()].copy_from_slice(&init.z);
        }
        y[l.theta_range()].copy_from_slice(&init.theta);
        y[l.mu_range()].copy_from_slice(&init.mu);
        y[l.rbar()] = init.rbar;
        if let (Some(i), Some(m)) = (l.sigma(), self.meta) {
            y[i] = m.sigma;
            y[i + 1] = m.mu_sigma;
        }
        Ok(y)
    }

    pub fn snapshot(&self, t: f64, y: &[f64], exo: &[f64]) -> Snapshot {
        let l = self.layout;
        let env_state = &y[l.env_range()];
        let mut x = vec![0.0; self.model.input_dim()];
        self.env.input(t, env_state, exo, &mut x);
        let output = self.model.output(&y[l.theta_range()], &x, &y[l.latent_range()]);
        let reward = self.env.reward(t, env_state, &x, output);
        let target = self.env.target(t, env_state, &x);
        Snapshot { input: x, output, target, reward, delta_r: rpe(reward, y[l.rbar()]) }
    }

    /// Parameter diffusion magnitude for the current state.
    fn sigma_at(&self, y: &[f64], i: usize) -> f64 {
        match (self.layout.sigma(), self.meta) {
            (Some(k), Some(_)) => y[k].max(SIGMA_FLOOR),
            _ => self.hp.sigma[i],
        }
    }
}

impl<E: Environment> SdeSystem for LearnerSystem<E> {
    fn state_dim(&self) -> usize {
        self.layout.state_dim()
    }

    fn noise_dim(&self) -> usize {
        self.layout.noise_dim()
    }

    fn exogenous_dim(&self) -> usize {
        self.env.exogenous_dim()
    }

    fn drift(&self, t: f64, y: &[f64], exo: &[f64], out: &mut [f64]) {
        let l = self.layout;
        let snap = self.snapshot(t, y, exo);
        let env_state = &y[l.env_range()];
        let theta = &y[l.theta_range()];
        let mu = &y[l.mu_range()];

        out.fill(0.0);
        self.env.drift(t, env_state, &snap.input, snap.output, &mut out[l.env_range()]);
        self.model.latent_drift(theta, &snap.input, &y[l.latent_range()], &mut out[l.latent_range()]);

        let rbar = y[l.rbar()];
        out[l.rbar()] = rbar_drift(snap.reward, rbar, self.hp.rho);
        out[l.ret()] = snap.reward;

        if self.mode == Mode::Frozen {
            return;
        }
        let delta = snap.delta_r;
        let theta_start = l.theta_range().start;
        let mu_start = l.mu_range().start;
        for i in 0..l.params {
            out[theta_start + i] = self.hp.lambda * (mu[i] - theta[i]);
            out[mu_start + i] = self.hp.eta * delta * (theta[i] - mu[i]);
        }
        if let (Some(k), Some(m)) = (l.sigma(), self.meta) {
            let current = MetaState { sigma: y[k], mu_sigma: y[k + 1], ..m };
            let d = meta_sigma_dynamics(&current, delta);
            out[k] = d.sigma_drift;
            out[k + 1] = d.mu_sigma_drift;
        }
    }

    fn diffusion(&self, t: f64, y: &[f64], _exo: &[f64], dw: &[f64], out: &mut [f64]) {
        let l = self.layout;
        self.env.diffusion(t, &y[l.env_range()], &dw[l.env_noise_range()], &mut out[l.env_range()]);
        if self.mode == Mode::Frozen {
            return;
        }
        let theta_start = l.theta_range().start;
        for i in 0..l.params {
            out[theta_start + i] = self.sigma_at(y, i) * dw[i];
        }
        if let (Some(k), Some(m)) = (l.sigma(), self.meta) {
            out[k] = m.meta_diffusion * dw[l.params];
        }
    }

    fn component_name(&self, i: usize) -> String {
        let l = self.layout;
        if l.env_range().contains(&i) {
            self.env.state_name(i)
        } else if l.latent_range().contains(&i) {
            format!("z_{}", i - l.latent_range().start)
        } else if l.theta_range().contains(&i) {
            format!("theta_{}", i - l.theta_range().start)
        } else if l.mu_range().contains(&i) {
            format!("mu_{}", i - l.mu_range().start)
        } else if i == l.rbar() {
            "rbar".into()
        } else if i == l.ret() {
            "G".into()
        } else if Some(i) == l.sigma() {
            "sigma".into()
        } else {
            "mu_sigma".into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::SupervisedTask;
    use crate::models::Nonlinearity;

    #[test]
    fn rpe_values() {
        assert_eq!(rpe(-1.0, -1.0), 0.0);
        assert_eq!(rpe(0.0, -1.0), 1.0);
        assert!((rpe(-0.25, -0.1) + 0.15).abs() < 1e-15);
    }

    #[test]
    fn rbar_drift_values() {
        assert_eq!(rbar_drift(-0.3, -0.3, 2.0), 0.0);
        assert_eq!(rbar_drift(0.0, -1.0, 1.0), 1.0);
    }

    #[test]
    fn theta_dynamics_values() {
        let hp = Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 1);
        let s = LearnerState::new(vec![0.4], vec![0.4], 0.0).unwrap();
        let (d, g) = theta_dynamics(&s, &hp).unwrap();
        assert_eq!(d, vec![0.0]);
        assert_eq!(g, vec![0.3]);
        let s = LearnerState::new(vec![0.0], vec![1.0], 0.0).unwrap();
        let (d, g) = theta_dynamics(&s, &hp).unwrap();
        assert_eq!((d, g), (vec![1.0], vec![0.3]));
    }

    #[test]
    fn mu_drift_values() {
        let hp = Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 2);
        let s = LearnerState::new(vec![0.7, -0.1], vec![0.5, 0.3], 0.0).unwrap();
        assert_eq!(mu_drift(&s, &hp, 0.0).unwrap(), vec![0.0, 0.0]);
        let d = mu_drift(&s, &hp, 0.5).unwrap();
        assert!((d[0] - 0.1).abs() < 1e-15 && (d[1] + 0.2).abs() < 1e-15);
        let same = LearnerState::new(vec![0.5, 0.3], vec![0.5, 0.3], 0.0).unwrap();
        assert_eq!(mu_drift(&same, &hp, 3.0).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_reported() {
        assert!(LearnerState::new(vec![0.0; 2], vec![0.0; 3], 0.0).is_err());
        let hp = Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 3);
        let s = LearnerState::new(vec![0.0; 2], vec![0.0; 2], 0.0).unwrap();
        assert!(theta_dynamics(&s, &hp).is_err());
    }

    #[test]
    fn stationary_covariance_values() {
        let c = stationary_covariance(&Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 3)).unwrap();
        for i in 0..3 {
            assert!((c[(i, i)] - 0.045).abs() < 1e-15);
        }
        assert_eq!(c[(0, 1)], 0.0);
        let c = stationary_covariance(&Hyperparams::uniform(1.0, 1.0, 1.0, 0.0, 2)).unwrap();
        assert!(c.iter().all(|v| *v == 0.0));
        let c = stationary_covariance(&Hyperparams::uniform(2.0, 1.0, 1.0, 0.2, 1)).unwrap();
        assert!((c[(0, 0)] - 0.01).abs() < 1e-15);
        assert!(matches!(
            stationary_covariance(&Hyperparams::uniform(0.0, 1.0, 1.0, 0.2, 1)),
            Err(Error::NoStationaryState)
        ));
    }

    #[test]
    fn meta_dynamics_values() {
        let m =
            MetaState { sigma: 0.2, mu_sigma: 0.2, lambda_sigma: 2.0, eta_sigma: 3.0, meta_diffusion: 1.0 };
        let d = meta_sigma_dynamics(&m, 0.7);
        assert_eq!((d.sigma_drift, d.mu_sigma_drift), (0.0, 0.0));
        assert_eq!(d.sigma_diffusion, 1.0);

        let m = MetaState { sigma: 0.25, mu_sigma: 0.15, ..m };
        assert!((meta_sigma_dynamics(&m, 0.0).sigma_drift + 0.2).abs() < 1e-15);

        let m = MetaState { sigma: 0.2, mu_sigma: 0.15, ..m };
        assert!((meta_sigma_dynamics(&m, 0.1).mu_sigma_drift - 0.015).abs() < 1e-15);

        let m = MetaState { sigma: -0.4, ..m };
        assert_eq!(meta_sigma_dynamics(&m, 0.0).effective_sigma, SIGMA_FLOOR);
    }

    fn single() -> SupervisedTask {
        SupervisedTask::teacher(Model::TanhScalar, vec![1.0], None).unwrap()
    }

    #[test]
    fn layout_bookkeeping() {
        let sys = learner_as_sde(
            Model::TanhScalar,
            single(),
            Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 1),
            None,
            Mode::Learning,
        )
        .unwrap();
        assert_eq!(sys.layout().learner_dim(), 4);
        assert_eq!(sys.noise_dim(), 1);
        assert_eq!(sys.state_dim(), 4);

        let ctrnn = Model::Ctrnn { nonlinearity: Nonlinearity::Tanh };
        let task = SupervisedTask::teacher(ctrnn.clone(), vec![0.3, 0.7, 1.0], None).unwrap();
        let sys =
            learner_as_sde(ctrnn, task, Hyperparams::uniform(1.0, 50.0, 1.0, 0.2, 3), None, Mode::Learning)
                .unwrap();
        assert_eq!(sys.layout().learner_dim(), 9);
        assert_eq!(sys.noise_dim(), 3);
        // The teacher's latent is carried as environment state.
        assert_eq!(sys.state_dim(), 10);

        let meta =
            MetaState { sigma: 0.15, mu_sigma: 0.15, lambda_sigma: 2.0, eta_sigma: 3.0, meta_diffusion: 1.0 };
        let sys = learner_as_sde(
            Model::TanhScalar,
            single(),
            Hyperparams::uniform(1.0, 1.0, 1.0, 0.15, 1),
            Some(meta),
            Mode::Learning,
        )
        .unwrap();
        assert_eq!(sys.layout().learner_dim(), 6);
        assert_eq!(sys.noise_dim(), 2);
        let names: Vec<String> = (0..6).map(|i| sys.component_name(i)).collect();
        assert_eq!(names, ["theta_0", "mu_0", "rbar", "G", "sigma", "mu_sigma"]);
    }

    #[test]
    fn model_parameter_mismatch() {
        let r = learner_as_sde(
            Model::TanhScalar,
            single(),
            Hyperparams::uniform(1.0, 1.0, 1.0, 0.3, 2),
            None,
            Mode::Learning,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn stacked_drift_matches_component_formulas() {
        let hp = Hyperparams::uniform(1.0, 2.0, 0.5, 0.3, 1);
        let sys = learner_as_sde(Model::TanhScalar, single(), hp.clone(), None, Mode::Learning).unwrap();
        let t = 4.0;
        let y = [0.2, 0.5, -0.3, -1.0];
        let mut out = [0.0; 4];
        sys.drift(t, &y, &[], &mut out);
        let x = (0.1 * t).sin();
        let r = -((0.2 * x).tanh() - x.tanh()).powi(2);
        let delta = r + 0.3;
        assert!((out[0] - 1.0 * (0.5 - 0.2)).abs() < 1e-15);
        assert!((out[1] - 2.0 * delta * (0.2 - 0.5)).abs() < 1e-15);
        assert!((out[2] - 0.5 * delta).abs() < 1e-15);
        assert!((out[3] - r).abs() < 1e-15);

        let frozen = learner_as_sde(Model::TanhScalar, single(), hp, None, Mode::Frozen).unwrap();
        frozen.drift(t, &y, &[], &mut out);
        assert_eq!((out[0], out[1]), (0.0, 0.0));
        let mut g = [0.0; 4];
        frozen.diffusion(t, &y, &[], &[1.0], &mut g);
        assert_eq!(g, [0.0; 4]);
    }
}
