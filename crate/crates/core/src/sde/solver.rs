use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sde::{TimeGrid, WienerSource};

/// A coupled system `dy = f(t, y, u) dt + g(t, y, u) dW`.
///
/// `u` is a vector of exogenous standard-normal draws that is resampled once
/// per step and held fixed across the predictor and corrector evaluations
/// (observation noise, for instance). The diffusion is supplied in product
/// form: implementors write `g(t, y, u) · dW` into `out`, which allows sparse
/// or diagonal structure without materialising a matrix.
pub trait SdeSystem {
    fn state_dim(&self) -> usize;

    /// Number of Wiener components consumed per step.
    fn noise_dim(&self) -> usize;

    fn exogenous_dim(&self) -> usize {
        0
    }

    fn drift(&self, t: f64, y: &[f64], exo: &[f64], out: &mut [f64]);

    fn diffusion(&self, t: f64, y: &[f64], exo: &[f64], dw: &[f64], out: &mut [f64]);

    fn component_name(&self, i: usize) -> String {
        format!("y{i}")
    }
}

/// Scratch buffers for repeated Euler-Heun steps.
#[derive(Debug, Clone)]
pub struct EulerHeun {
    drift: Vec<f64>,
    g_left: Vec<f64>,
    g_pred: Vec<f64>,
    predictor: Vec<f64>,
}

impl EulerHeun {
    pub fn new(dim: usize) -> Self {
        EulerHeun {
            drift: vec![0.0; dim],
            g_left: vec![0.0; dim],
            g_pred: vec![0.0; dim],
            predictor: vec![0.0; dim],
        }
    }

    /// Advances `y` in place by one step of length `dt`.
    ///
    /// Predictor `ỹ = y + f dt + g(y) dW`, corrector
    /// `y' = y + f dt + ½ (g(y) + g(ỹ)) dW`. Non-finite drift or diffusion
    /// output is reported with step index 0; [`integrate`] rewrites it.
    pub fn step<S: SdeSystem + ?Sized>(
        &mut self,
        system: &S,
        t: f64,
        y: &mut [f64],
        dt: f64,
        dw: &[f64],
        exo: &[f64],
    ) -> Result<()> {
        let n = system.state_dim();
        check_len("state", n, y.len())?;
        check_len("Wiener increment", system.noise_dim(), dw.len())?;
        check_len("exogenous input", system.exogenous_dim(), exo.len())?;
        if self.drift.len() != n {
            *self = EulerHeun::new(n);
        }

        system.drift(t, y, exo, &mut self.drift);
        check_finite(system, &self.drift, "drift", t)?;
        self.g_left.fill(0.0);
        system.diffusion(t, y, exo, dw, &mut self.g_left);
        check_finite(system, &self.g_left, "diffusion", t)?;

        for i in 0..n {
            self.predictor[i] = y[i] + self.drift[i] * dt + self.g_left[i];
        }
        self.g_pred.fill(0.0);
        system.diffusion(t, &self.predictor, exo, dw, &mut self.g_pred);
        check_finite(system, &self.g_pred, "diffusion", t)?;

        for i in 0..n {
            y[i] += self.drift[i] * dt + 0.5 * (self.g_left[i] + self.g_pred[i]);
        }
        check_finite(system, y, "state", t)
    }
}

fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { context, expected, actual });
    }
    Ok(())
}

fn check_finite<S: SdeSystem + ?Sized>(system: &S, v: &[f64], quantity: &'static str, t: f64) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        None => Ok(()),
        Some(component) => Err(Error::NonFinite {
            step: 0,
            time: t,
            quantity,
            component,
            name: system.component_name(component),
        }),
    }
}

/// One Euler-Heun step from `state` at time `t`, returning the new state.
pub fn euler_heun_step<S: SdeSystem + ?Sized>(
    system: &S,
    t: f64,
    state: &[f64],
    dt: f64,
    dw: &[f64],
    exo: &[f64],
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidGrid(format!("dt must be > 0, got {dt}")));
    }
    let mut y = state.to_vec();
    EulerHeun::new(state.len()).step(system, t, &mut y, dt, dw, exo)?;
    Ok(y)
}

/// Which steps are kept in the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordPolicy {
    pub stride: usize,
}

impl Default for RecordPolicy {
    fn default() -> Self {
        RecordPolicy { stride: 1 }
    }
}

impl RecordPolicy {
    pub fn every(stride: usize) -> Self {
        RecordPolicy { stride: stride.max(1) }
    }

    /// Steps `0, k, 2k, …` plus the final step.
    pub fn records(&self, step: usize, last: usize) -> bool {
        step.is_multiple_of(self.stride) || step == last
    }
}

/// Recorded `(t, state)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }

    /// CSV with header `t,<name_0>,...` and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "t")?;
        for name in &self.names {
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (t, state) in self.times.iter().zip(&self.states) {
            write!(w, "{}", fmt_f64(*t))?;
            for v in state {
                write!(w, ",{}", fmt_f64(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// Formats with 17 significant digits, which round-trips any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Callback invoked on every recorded step, before the step is taken, with
/// the exogenous draws that step will use.
pub trait StepObserver {
    fn observe(&mut self, step: usize, t: f64, state: &[f64], exo: &[f64]);
}

impl<F: FnMut(usize, f64, &[f64], &[f64])> StepObserver for F {
    fn observe(&mut self, step: usize, t: f64, state: &[f64], exo: &[f64]) {
        self(step, t, state, exo)
    }
}

/// Integrates `system` over `grid` from `initial` and records a trajectory.
pub fn integrate<S: SdeSystem + ?Sized>(
    system: &S,
    grid: &TimeGrid,
    initial: &[f64],
    noise: &mut WienerSource,
    policy: RecordPolicy,
) -> Result<Trajectory> {
    integrate_observed(system, grid, initial, noise, policy, &mut |_, _, _: &[f64], _: &[f64]| {})
}

/// Like [`integrate`], additionally calling `observer` on recorded steps.
///
/// Per step the exogenous draws are taken from `noise` first, then the
/// Wiener increments, so the draw order is fixed for a given system shape.
pub fn integrate_observed<S: SdeSystem + ?Sized, O: StepObserver + ?Sized>(
    system: &S,
    grid: &TimeGrid,
    initial: &[f64],
    noise: &mut WienerSource,
    policy: RecordPolicy,
    observer: &mut O,
) -> Result<Trajectory> {
    grid.validate()?;
    let n = system.state_dim();
    check_len("initial state", n, initial.len())?;
    check_len("Wiener source", system.noise_dim(), noise.dim())?;

    let steps = grid.steps();
    let mut y = initial.to_vec();
    let mut dw = vec![0.0; system.noise_dim()];
    let mut exo = vec![0.0; system.exogenous_dim()];
    let mut stepper = EulerHeun::new(n);
    let capacity = steps / policy.stride + 2;
    let mut traj = Trajectory {
        names: (0..n).map(|i| system.component_name(i)).collect(),
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
    };

    for k in 0..=steps {
        let t = grid.time(k);
        noise.standard_normals(&mut exo);
        if policy.records(k, steps) {
            observer.observe(k, t, &y, &exo);
            traj.times.push(t);
            traj.states.push(y.clone());
        }
        if k == steps {
            break;
        }
        noise.increments(grid.dt, &mut dw);
        stepper.step(system, t, &mut y, grid.dt, &dw, &exo).map_err(|e| match e {
            Error::NonFinite { time, quantity, component, name, .. } => {
                Error::NonFinite { step: k, time, quantity, component, name }
            }
            other => other,
        })?;
    }
    Ok(traj)
}

/// System assembled from closures, with diagonal diffusion. Handy for tests
/// and small scalar problems.
pub struct DiagonalSde<F, G> {
    dim: usize,
    drift: F,
    diffusion: G,
}

impl<F, G> DiagonalSde<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64], &mut [f64]),
{
    /// `drift(t, y, out)` writes `f`; `diffusion(t, y, out)` writes the
    /// diagonal of `g`.
    pub fn new(dim: usize, drift: F, diffusion: G) -> Self {
        DiagonalSde { dim, drift, diffusion }
    }
}

impl<F, G> SdeSystem for DiagonalSde<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64], &mut [f64]),
{
    fn state_dim(&self) -> usize {
        self.dim
    }

    fn noise_dim(&self) -> usize {
        self.dim
    }

    fn drift(&self, t: f64, y: &[f64], _exo: &[f64], out: &mut [f64]) {
        (self.drift)(t, y, out)
    }

    fn diffusion(&self, t: f64, y: &[f64], _exo: &[f64], dw: &[f64], out: &mut [f64]) {
        (self.diffusion)(t, y, out);
        for (o, w) in out.iter_mut().zip(dw) {
            *o *= w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou(lambda: f64, mu: f64, sigma: f64) -> impl SdeSystem {
        DiagonalSde::new(
            1,
            move |_, y: &[f64], out: &mut [f64]| out[0] = lambda * (mu - y[0]),
            move |_, _: &[f64], out: &mut [f64]| out[0] = sigma,
        )
    }

    #[test]
    fn deterministic_mean_reversion_step() {
        let y = euler_heun_step(&ou(1.0, 1.0, 0.0), 0.0, &[0.0], 0.05, &[0.0], &[]).unwrap();
        assert!((y[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn zero_drift_is_identity() {
        let sys = ou(0.0, 0.0, 0.7);
        let y = euler_heun_step(&sys, 3.0, &[1.25], 0.05, &[0.0], &[]).unwrap();
        assert_eq!(y, vec![1.25]);
    }

    #[test]
    fn additive_ou_step_by_hand() {
        // 0.2 + 1·(0 − 0.2)·0.05 + 0.3·0.1
        let y = euler_heun_step(&ou(1.0, 0.0, 0.3), 0.0, &[0.2], 0.05, &[0.1], &[]).unwrap();
        assert!((y[0] - 0.22).abs() < 1e-15, "{}", y[0]);
    }

    #[test]
    fn multiplicative_noise_uses_heun_correction() {
        // dy = y dW: predictor ỹ = y(1 + dW), corrector y + ½(y + ỹ) dW.
        let sys = DiagonalSde::new(
            1,
            |_, _: &[f64], out: &mut [f64]| out[0] = 0.0,
            |_, y: &[f64], out: &mut [f64]| out[0] = y[0],
        );
        let y = euler_heun_step(&sys, 0.0, &[2.0], 0.01, &[0.5], &[]).unwrap();
        let pred = 2.0 * 1.5;
        assert!((y[0] - (2.0 + 0.5 * (2.0 + pred) * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_drift_reports_step_and_component() {
        let sys = DiagonalSde::new(
            2,
            |t, _: &[f64], out: &mut [f64]| {
                out[0] = 0.0;
                out[1] = if t > 0.12 { f64::NAN } else { 0.0 };
            },
            |_, _: &[f64], out: &mut [f64]| out.fill(0.0),
        );
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
        let err = integrate(&sys, &grid, &[0.0, 0.0], &mut WienerSource::new(0, 2), RecordPolicy::default())
            .unwrap_err();
        match err {
            Error::NonFinite { step, component, quantity, .. } => {
                assert_eq!(step, 3);
                assert_eq!(component, 1);
                assert_eq!(quantity, "drift");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stride_keeps_first_and_last() {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
        let traj = integrate(
            &ou(1.0, 0.0, 0.0),
            &grid,
            &[1.0],
            &mut WienerSource::new(0, 1),
            RecordPolicy::every(6),
        )
        .unwrap();
        let steps: Vec<f64> = traj.times.iter().map(|t| (t / 0.05).round()).collect();
        assert_eq!(steps, vec![0.0, 6.0, 12.0, 18.0, 20.0]);
    }

    #[test]
    fn wrong_noise_dimension_is_rejected() {
        let grid = TimeGrid::new(0.0, 1.0, 0.05).unwrap();
        let r = integrate(
            &ou(1.0, 0.0, 0.1),
            &grid,
            &[0.0],
            &mut WienerSource::new(0, 2),
            RecordPolicy::default(),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let traj = Trajectory {
            names: vec!["theta".into()],
            times: vec![0.0, 0.05],
            states: vec![vec![0.1], vec![1.0 / 3.0]],
        };
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,theta"));
        lines.next();
        let row = lines.next().unwrap();
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v.to_bits(), (1.0f64 / 3.0).to_bits());
    }
}
