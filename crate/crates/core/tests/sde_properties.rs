use oua::config::preset;
use oua::env::{DoubleIntegrator, Environment, SupervisedTask};
use oua::harness::{Experiment, RunMode};
use oua::learner::{learner_as_sde, Hyperparams, InitialConditions, Mode};
use oua::models::{Model, Nonlinearity};
use oua::sde::{euler_heun_step, integrate, DiagonalSde, RecordPolicy, TimeGrid, WienerSource};
use proptest::prelude::*;

#[derive(Clone)]
struct ConstantReward(f64);

impl Environment for ConstantReward {
    fn input_dim(&self) -> usize {
        1
    }
    fn input(&self, _t: f64, _s: &[f64], _e: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
    }
    fn reward(&self, _t: f64, _s: &[f64], _x: &[f64], _y: f64) -> f64 {
        self.0
    }
}

/// A task with its reward multiplied by `c`.
#[derive(Clone)]
struct Scaled<E>(E, f64);

impl<E: Environment> Environment for Scaled<E> {
    fn input_dim(&self) -> usize {
        self.0.input_dim()
    }
    fn state_dim(&self) -> usize {
        self.0.state_dim()
    }
    fn input(&self, t: f64, s: &[f64], e: &[f64], out: &mut [f64]) {
        self.0.input(t, s, e, out)
    }
    fn reward(&self, t: f64, s: &[f64], x: &[f64], y: f64) -> f64 {
        self.1 * self.0.reward(t, s, x, y)
    }
    fn drift(&self, t: f64, s: &[f64], x: &[f64], y: f64, out: &mut [f64]) {
        self.0.drift(t, s, x, y, out)
    }
}

fn init(theta: f64, mu: f64, rbar: f64) -> InitialConditions {
    InitialConditions { theta: vec![theta], mu: vec![mu], rbar, z: vec![] }
}

#[test]
fn wiener_increment_statistics() {
    let n = 200_000;
    let dt = 0.05;
    let mut w = WienerSource::new(42, 1);
    let mut buf = vec![0.0; n];
    w.increments(dt, &mut buf);
    let mean = buf.iter().sum::<f64>() / n as f64;
    let var = buf.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 4.0 * dt.sqrt() / (n as f64).sqrt(), "mean {mean}");
    assert!((var - dt).abs() < 0.05 * dt, "var {var}");
}

proptest! {
    #[test]
    fn additive_noise_matches_euler_maruyama(
        lambda in 0.1f64..5.0, sigma in 0.0f64..2.0, y0 in -3.0f64..3.0, dw in -0.5f64..0.5,
    ) {
        let sde = DiagonalSde::new(
            1,
            move |_t, y: &[f64], o: &mut [f64]| o[0] = -lambda * y[0],
            move |_t, _y: &[f64], o: &mut [f64]| o[0] = sigma,
        );
        let y1 = euler_heun_step(&sde, 0.0, &[y0], 0.05, &[dw], &[]).unwrap();
        let em = y0 - lambda * y0 * 0.05 + sigma * dw;
        prop_assert!((y1[0] - em).abs() <= 4.0 * f64::EPSILON * (y0.abs() + (sigma * dw).abs()), "{} vs {}", y1[0], em);
    }

    #[test]
    fn tanh_models_stay_inside_unit_interval(
        theta in prop::collection::vec(-2.0f64..2.0, 3), x in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        // Arguments are kept below the f64 saturation point of tanh.
        let y = Model::TanhMulti { dim: 3 }.output(&theta, &x, &[]);
        prop_assert!(y > -1.0 && y < 1.0);
        let y = Model::TanhScalar.output(&theta[..1], &x[..1], &[]);
        prop_assert!(y > -1.0 && y < 1.0);
    }

    #[test]
    fn ctrnn_latent_stays_bounded(
        w in prop::collection::vec(-4.0f64..4.0, 3), z0 in -3.0f64..3.0, freq in 0.01f64..2.0,
    ) {
        let model = Model::Ctrnn { nonlinearity: Nonlinearity::Tanh };
        let theta = w.clone();
        let sde = DiagonalSde::new(
            1,
            move |t, z: &[f64], o: &mut [f64]| model.latent_drift(&theta, &[(freq * t).sin()], z, o),
            |_t, _z: &[f64], o: &mut [f64]| o[0] = 0.0,
        );
        let grid = TimeGrid::new(0.0, 30.0, 0.05).unwrap();
        let tr = integrate(&sde, &grid, &[z0], &mut WienerSource::new(0, 1), RecordPolicy::default()).unwrap();
        let bound = z0.abs().max(1.0) + 1.0;
        prop_assert!(tr.component(0).iter().all(|z| z.abs() <= bound));
    }

    #[test]
    fn gate_keeps_mean_fixed(theta0 in -2.0f64..2.0, r0 in -3.0f64..3.0, seed in 0u64..1000) {
        let sys = learner_as_sde(
            Model::TanhScalar,
            ConstantReward(r0),
            Hyperparams::uniform(1.0, 10.0, 1.0, 0.5, 1),
            None,
            Mode::Learning,
        ).unwrap();
        let y0 = sys.initial_state(&init(theta0, 0.3, r0)).unwrap();
        let grid = TimeGrid::new(0.0, 20.0, 0.05).unwrap();
        let tr = integrate(&sys, &grid, &y0, &mut WienerSource::new(seed, 1), RecordPolicy::default()).unwrap();
        let mu = sys.layout().mu_range().start;
        prop_assert!(tr.states.iter().all(|s| s[mu] == 0.3));
    }

    #[test]
    fn mean_reversion_bound(theta0 in -3.0f64..3.0, mu in -1.0f64..1.0, lambda in 0.2f64..3.0) {
        let sys = learner_as_sde(
            Model::TanhScalar,
            ConstantReward(0.0),
            Hyperparams::uniform(lambda, 1.0, 1.0, 0.0, 1),
            None,
            Mode::Learning,
        ).unwrap();
        let y0 = sys.initial_state(&init(theta0, mu, 0.0)).unwrap();
        let dt = 0.05;
        let grid = TimeGrid::new(0.0, 10.0, dt).unwrap();
        let tr = integrate(&sys, &grid, &y0, &mut WienerSource::new(0, 1), RecordPolicy::default()).unwrap();
        let th = sys.layout().theta_range().start;
        let gap: Vec<f64> = tr.states.iter().map(|s| (s[th] - mu).abs()).collect();
        prop_assert!(gap.windows(2).all(|w| w[1] <= w[0]));
        for (t, g) in tr.times.iter().zip(&gap) {
            prop_assert!(*g <= gap[0] * (-lambda * t).exp() * (1.0 + 5.0 * dt) + 1e-15);
        }
    }

    #[test]
    fn reward_filter_bound(r0 in -3.0f64..3.0, rbar0 in -3.0f64..3.0, rho in 0.1f64..5.0) {
        let sys = learner_as_sde(
            Model::TanhScalar,
            ConstantReward(r0),
            Hyperparams::uniform(1.0, 1.0, rho, 0.3, 1),
            None,
            Mode::Frozen,
        ).unwrap();
        let y0 = sys.initial_state(&init(0.0, 0.0, rbar0)).unwrap();
        let dt = 0.05;
        let grid = TimeGrid::new(0.0, 10.0, dt).unwrap();
        let tr = integrate(&sys, &grid, &y0, &mut WienerSource::new(0, 1), RecordPolicy::default()).unwrap();
        let rb = sys.layout().rbar();
        for (t, s) in tr.times.iter().zip(&tr.states) {
            prop_assert!((s[rb] - r0).abs() <= (rbar0 - r0).abs() * (-rho * t).exp() * (1.0 + 5.0 * dt) + 1e-15);
        }
    }
}

#[test]
fn weak_convergence_on_linear_ou() {
    // dX = −λX dt + σ dW, X₀ = 1: E[X_T] = e^{−λT}. Coarse paths sum the
    // fine increments, so all step sizes share the same Brownian paths.
    let (lambda, sigma, t_end) = (1.0, 0.3, 1.0);
    let sde = DiagonalSde::new(
        1,
        move |_t, y: &[f64], o: &mut [f64]| o[0] = -lambda * y[0],
        move |_t, _y: &[f64], o: &mut [f64]| o[0] = sigma,
    );
    let dts: [f64; 3] = [0.1, 0.05, 0.025];
    let fine = (t_end / dts[2]).round() as usize;
    let seeds = 2000;
    let mut sums = [0.0; 3];
    for seed in 0..seeds {
        let mut dw = vec![0.0; fine];
        WienerSource::new(seed, 1).increments(dts[2], &mut dw);
        for (j, dt) in dts.iter().enumerate() {
            let group = (dt / dts[2]).round() as usize;
            let mut y = vec![1.0];
            for (k, chunk) in dw.chunks(group).enumerate() {
                let inc: f64 = chunk.iter().sum();
                y = euler_heun_step(&sde, k as f64 * dt, &y, *dt, &[inc], &[]).unwrap();
            }
            sums[j] += y[0];
        }
    }
    let exact = (-lambda * t_end).exp();
    let err: Vec<f64> = sums.iter().map(|s| (s / seeds as f64 - exact).abs()).collect();
    assert!(err[0] > err[1] && err[1] > err[2], "{err:?}");
}

#[test]
fn identical_seed_identical_run() {
    let mut c = preset("fig4").unwrap();
    c.grid.t_end = Some(5.0);
    let exp = Experiment::new(c).unwrap();
    let a = exp.run(7, RunMode::Learning).unwrap();
    let b = exp.run(7, RunMode::Learning).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.reward, b.reward);
}

#[test]
fn return_is_left_point_sum_of_rewards() {
    let mut c = preset("fig5").unwrap();
    c.grid.t_end = Some(30.0);
    let exp = Experiment::new(c).unwrap();
    let rec = exp.run(2, RunMode::Learning).unwrap();
    let dt = exp.grid().dt;
    let n = rec.reward.len();
    let sum: f64 = rec.reward[..n - 1].iter().map(|r| r * dt).sum();
    let g = rec.summary.g_final;
    assert!((sum - g).abs() <= 1e-9 * g.abs(), "{sum} vs {g}");
}

#[test]
fn reward_scale_symmetry() {
    // Rewards ×c, r̄₀ ×c and η ÷c leave η·δ_r, hence μ, unchanged.
    let c = 4.0;
    let task = SupervisedTask::teacher(Model::TanhScalar, vec![1.0], None).unwrap();
    let run = |scale: f64| {
        let sys = learner_as_sde(
            Model::TanhScalar,
            Scaled(task.clone(), scale),
            Hyperparams::uniform(1.0, 1.0 / scale, 1.0, 0.3, 1),
            None,
            Mode::Learning,
        )
        .unwrap();
        let y0 = sys.initial_state(&init(0.0, 0.0, -scale)).unwrap();
        let grid = TimeGrid::new(0.0, 50.0, 0.05).unwrap();
        let tr = integrate(&sys, &grid, &y0, &mut WienerSource::new(5, 1), RecordPolicy::default()).unwrap();
        tr.component(sys.layout().mu_range().start)
    };
    let (a, b) = (run(1.0), run(c));
    let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn pd_feedback_stabilises_double_integrator() {
    let mut plant = DoubleIntegrator::new(0.01, 0.0, 0.0);
    plant.s0 = [1.0, -0.5];
    let sys = learner_as_sde(
        Model::Linear { dim: 2 },
        plant,
        Hyperparams::uniform(1.0, 1.0, 1.0, 0.0, 2),
        None,
        Mode::Frozen,
    )
    .unwrap();
    let y0 = sys
        .initial_state(&InitialConditions {
            theta: vec![-1.0, -1.0],
            mu: vec![-1.0, -1.0],
            rbar: 0.0,
            z: vec![],
        })
        .unwrap();
    let grid = TimeGrid::new(0.0, 40.0, 0.05).unwrap();
    let mut w = WienerSource::new(0, sys.layout().noise_dim());
    let tr = integrate(&sys, &grid, &y0, &mut w, RecordPolicy::default()).unwrap();
    let end = tr.last().unwrap();
    assert!(end[0].hypot(end[1]) < 1e-3, "{end:?}");
}
