//! A bare Ornstein-Uhlenbeck process integrated with the Euler-Heun solver.
//! Compares the empirical stationary variance with σ²/2λ.
//!
//! cargo run --release --example ou_process

use oua::harness::mean;
use oua::learner::{stationary_covariance, Hyperparams};
use oua::sde::{integrate, DiagonalSde, RecordPolicy, TimeGrid, WienerSource};

fn main() -> oua::Result<()> {
    let (lambda, sigma, mu) = (1.0, 0.3, 0.5);
    let sde = DiagonalSde::new(
        1,
        move |_t, y: &[f64], out: &mut [f64]| out[0] = lambda * (mu - y[0]),
        move |_t, _y: &[f64], out: &mut [f64]| out[0] = sigma,
    );
    let grid = TimeGrid::new(0.0, 2000.0, 0.05)?;
    let expected = stationary_covariance(&Hyperparams::uniform(lambda, 0.0, 0.0, sigma, 1))?[(0, 0)];

    println!("seed  mean      variance");
    let mut vars = Vec::new();
    for seed in 0..5 {
        let traj = integrate(&sde, &grid, &[mu], &mut WienerSource::new(seed, 1), RecordPolicy::default())?;
        // Discard the first 10 relaxation times.
        let xs: Vec<f64> =
            traj.times.iter().zip(traj.component(0)).filter(|(t, _)| **t >= 10.0).map(|(_, x)| x).collect();
        let m = mean(&xs);
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        println!("{seed:>4}  {m:+.4}  {v:.5}");
        vars.push(v);
    }
    println!("mean variance {:.5}, theory σ²/2λ = {expected:.5}", mean(&vars));
    Ok(())
}
