//! Six weights of `y = tanh(θᵀx)` learned from sinusoidal inputs. Prints the
//! per-component error of the learned mean and the reward rate of the frozen
//! mean against the late learning phase.
//!
//! cargo run --release --example multi_parameter [n_seeds] [t_end]

use oua::config::preset;
use oua::harness::{median, Experiment};

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let mut config = preset("fig5").expect("preset");
    if let Some(t) = args.next() {
        config.grid.t_end = Some(t.parse().expect("t_end"));
    }
    let seeds: Vec<u64> = (0..n).collect();
    let res = Experiment::new(config.clone())?.run_all(&seeds);

    let teacher = &config.task.teacher;
    for (i, target) in teacher.iter().enumerate() {
        let mus: Vec<f64> = res.learning.iter().map(|r| r.summary.mu_final[i]).collect();
        println!("θ*_{i} = {target:+.2}  median μ_{i}(T) = {:+.3}", median(&mus));
    }
    for (l, f) in res.learning.iter().zip(&res.frozen_mean) {
        println!(
            "seed {:>2}  late learning rate {:+.4}  frozen-mean rate {:+.4}",
            l.summary.seed, l.summary.metrics["reward_rate_last10"], f.summary.metrics["reward_rate"]
        );
    }
    Ok(())
}
