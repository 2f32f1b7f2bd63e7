//! Learning the single weight of `y = tanh(θx)` from a teacher with θ* = 1,
//! compared against the same runs with θ frozen at θ₀.
//!
//! cargo run --release --example single_parameter [n_seeds] [out_dir]

use std::path::PathBuf;

use oua::config::preset;
use oua::harness::{mean, write_experiment, Experiment};

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let out = args.next().map(PathBuf::from);

    let config = preset("fig2").expect("preset");
    let seeds: Vec<u64> = (0..n).collect();
    let res = Experiment::new(config)?.run_all(&seeds);

    println!("seed  mu(T)     G(T)       G(T) frozen");
    for (l, b) in res.learning.iter().zip(&res.baseline) {
        println!(
            "{:>4}  {:+.4}  {:>9.3}  {:>9.3}",
            l.summary.seed, l.summary.mu_final[0], l.summary.g_final, b.summary.g_final
        );
    }
    let base: Vec<f64> = res.baseline.iter().map(|r| r.summary.g_final).collect();
    println!("mean G(T): learning {:.3}, frozen {:.3}", res.mean_return(), mean(&base));

    if let Some(dir) = out {
        write_experiment(&dir, &res, &std::env::args().collect::<Vec<_>>(), chrono::Utc::now())?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
