//! Parametric inference models `y = g_θ(z, x)` with optional latent drift
//! `dz/dt = f_θ(z, x)`. All models emit a scalar output.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squashing function for the recurrent model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Tanh,
    Logistic,
}

impl Nonlinearity {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Nonlinearity::Tanh => v.tanh(),
            Nonlinearity::Logistic => 1.0 / (1.0 + (-v).exp()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    /// `tanh(θ x)`, one parameter and one input.
    TanhScalar,
    /// `tanh(θᵀx)`.
    TanhMulti { dim: usize },
    /// `θᵀx`.
    Linear { dim: usize },
    /// `dz = (f(θ₁z + θ₂x) − z) dt`, `y = θ₃ z`.
    Ctrnn {
        #[serde(default)]
        nonlinearity: Nonlinearity,
    },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::TanhScalar => "tanh_scalar",
            Model::TanhMulti { .. } => "tanh_multi",
            Model::Linear { .. } => "linear",
            Model::Ctrnn { .. } => "ctrnn",
        }
    }

    pub fn param_dim(&self) -> usize {
        match self {
            Model::TanhScalar => 1,
            Model::TanhMulti { dim } | Model::Linear { dim } => *dim,
            Model::Ctrnn { .. } => 3,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::TanhScalar | Model::Ctrnn { .. } => 1,
            Model::TanhMulti { dim } | Model::Linear { dim } => *dim,
        }
    }

    pub fn latent_dim(&self) -> usize {
        match self {
            Model::Ctrnn { .. } => 1,
            _ => 0,
        }
    }

    /// Output for parameters `theta`, input `x` and latent `z`. Slice lengths
    /// are assumed to match the model's dimensions.
    pub fn output(&self, theta: &[f64], x: &[f64], z: &[f64]) -> f64 {
        match self {
            Model::TanhScalar => (theta[0] * x[0]).tanh(),
            Model::TanhMulti { .. } => dot(theta, x).tanh(),
            Model::Linear { .. } => dot(theta, x),
            Model::Ctrnn { .. } => theta[2] * z[0],
        }
    }

    /// Writes `dz/dt` into `out`; a no-op for models without latent state.
    pub fn latent_drift(&self, theta: &[f64], x: &[f64], z: &[f64], out: &mut [f64]) {
        if let Model::Ctrnn { nonlinearity } = self {
            out[0] = nonlinearity.apply(theta[0] * z[0] + theta[1] * x[0]) - z[0];
        }
    }

    pub fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                context: "model parameters",
                expected: self.param_dim(),
                actual: theta.len(),
            });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn check_same_len(context: &'static str, theta: &[f64], x: &[f64]) -> Result<()> {
    if theta.len() != x.len() {
        return Err(Error::DimensionMismatch { context, expected: theta.len(), actual: x.len() });
    }
    Ok(())
}

pub fn tanh_scalar(theta: f64, x: f64) -> f64 {
    (theta * x).tanh()
}

pub fn tanh_multi(theta: &[f64], x: &[f64]) -> Result<f64> {
    check_same_len("tanh_multi input", theta, x)?;
    Ok(dot(theta, x).tanh())
}

pub fn linear(theta: &[f64], x: &[f64]) -> Result<f64> {
    check_same_len("linear input", theta, x)?;
    Ok(dot(theta, x))
}

/// Recurrent cell with `tanh`: returns `(dz/dt, y)`.
pub fn ctrnn(theta: [f64; 3], x: f64, z: f64) -> (f64, f64) {
    ((theta[0] * z + theta[1] * x).tanh() - z, theta[2] * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_values() {
        assert_eq!(tanh_scalar(0.0, 3.0), 0.0);
        assert_eq!(tanh_scalar(1.0, 0.0), 0.0);
        assert!((tanh_scalar(1.0, 0.5) - 0.46211715726000974).abs() < 1e-15);
    }

    #[test]
    fn multi_values() {
        let x = [0.2, -1.0, 0.5];
        assert_eq!(tanh_multi(&[0.0; 3], &x).unwrap(), 0.0);
        assert_eq!(tanh_multi(&[1.0, 0.0, -0.4], &[0.0, 5.0, 0.0]).unwrap(), 0.0);
        let target = [0.3, 1.1, 0.0, -0.3, -1.5, -0.4];
        let e2 = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!((tanh_multi(&target, &e2).unwrap() - 1.1f64.tanh()).abs() < 1e-15);
        assert!((1.1f64.tanh() - 0.8005).abs() < 1e-4);
        assert!(tanh_multi(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_values() {
        assert_eq!(linear(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(linear(&[1.0, 0.0, 0.0], &[3.2, 7.0, -1.0]).unwrap(), 3.2);
        assert_eq!(linear(&[0.5, -0.5], &[2.0, 2.0]).unwrap(), 0.0);
        assert!(linear(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn ctrnn_values() {
        assert_eq!(ctrnn([0.3, 0.7, 1.0], 0.0, 0.0), (0.0, 0.0));
        let (dz, y) = ctrnn([0.3, 0.7, 1.0], 1.0, 0.0);
        assert!((dz - 0.7f64.tanh()).abs() < 1e-15);
        assert!((dz - 0.6044).abs() < 1e-4);
        assert_eq!(y, 0.0);
    }

    /// Equilibrium of the recurrent cell found by bisection on
    /// `z − tanh(θ₁z + θ₂x)`, which is increasing in z for θ₁ < 1.
    fn ctrnn_equilibrium(theta1: f64, theta2: f64, x: f64) -> f64 {
        let h = |z: f64| z - (theta1 * z + theta2 * x).tanh();
        let (mut lo, mut hi) = (-2.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn ctrnn_equilibrium_is_fixed_point() {
        for (t1, t2, x) in [(0.3, 0.7, 1.0), (0.3, 0.7, -0.4), (0.9, -1.2, 0.8)] {
            let z = ctrnn_equilibrium(t1, t2, x);
            let (dz, y) = ctrnn([t1, t2, 1.0], x, z);
            assert!(dz.abs() < 1e-12);
            assert_eq!(y, z);
            let m = Model::Ctrnn { nonlinearity: Nonlinearity::Tanh };
            let mut out = [0.0];
            m.latent_drift(&[t1, t2, 1.0], &[x], &[z], &mut out);
            assert!(out[0].abs() < 1e-12);
        }
    }

    #[test]
    fn model_dimensions() {
        assert_eq!(Model::TanhScalar.param_dim(), 1);
        assert_eq!(Model::Ctrnn { nonlinearity: Nonlinearity::Tanh }.latent_dim(), 1);
        assert_eq!(Model::Linear { dim: 6 }.input_dim(), 6);
        assert!(Model::Linear { dim: 2 }.check_params(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn tanh_bounded_and_odd(theta in -50.0f64..50.0, x in -50.0f64..50.0) {
            let y = tanh_scalar(theta, x);
            prop_assert!(y.abs() <= 1.0);
            prop_assert_eq!(tanh_scalar(theta, -x), -y);
        }

        #[test]
        fn tanh_multi_odd(theta in prop::collection::vec(-3.0f64..3.0, 4),
                          x in prop::collection::vec(-3.0f64..3.0, 4)) {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let a = tanh_multi(&theta, &x).unwrap();
            let b = tanh_multi(&theta, &neg).unwrap();
            prop_assert!((a + b).abs() < 1e-15);
            prop_assert!(a.abs() < 1.0 || dot(&theta, &x).abs() > 15.0);
        }

        #[test]
        fn linear_is_homogeneous(a in -8.0f64..8.0,
                                 theta in prop::collection::vec(-3.0f64..3.0, 3),
                                 x in prop::collection::vec(-3.0f64..3.0, 3)) {
            let scaled: Vec<f64> = theta.iter().map(|t| a * t).collect();
            let lhs = linear(&scaled, &x).unwrap();
            let rhs = a * linear(&theta, &x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
