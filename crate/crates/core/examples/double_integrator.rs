//! Linear feedback control of a noisy double integrator. The controller
//! `y = θᵀx` sees position and velocity through observation noise and is
//! rewarded for keeping both, and the control effort, small.
//!
//! cargo run --release --example double_integrator [n_seeds] [t_end]

use oua::config::preset;
use oua::harness::{mean, Experiment, RunMode};

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let mut config = preset("fig7").expect("preset");
    config.grid.t_end = Some(args.next().map(|s| s.parse().expect("t_end")).unwrap_or(200.0));
    let exp = Experiment::new(config)?;

    // A hand-tuned PD law for comparison.
    let pd = exp.run(0, RunMode::FrozenMean(vec![-1.0, -1.0]))?;
    println!("PD law θ = (-1, -1): G(T) = {:.3}", pd.summary.g_final);

    let mut ok = Vec::new();
    for seed in 0..n {
        match exp.run(seed, RunMode::Learning) {
            Ok(r) => {
                let s = &r.summary;
                println!(
                    "seed {seed:>2}  μ(T) = ({:+.3}, {:+.3})  G(T) = {:.3}  ‖s‖ late = {:.3}",
                    s.mu_final[0], s.mu_final[1], s.g_final, s.metrics["norm_s_last10"]
                );
                ok.push(s.g_final);
            }
            Err(e) => println!("seed {seed:>2}  diverged: {e}"),
        }
    }
    if !ok.is_empty() {
        println!("mean G(T) over {} finished runs: {:.3}", ok.len(), mean(&ok));
    }
    Ok(())
}
