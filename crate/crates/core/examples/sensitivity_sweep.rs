//! Sensitivity of the final return to λ, σ, ρ and η on the single-parameter
//! task, each swept over two decades around its default.
//!
//! cargo run --release --example sensitivity_sweep [n_seeds] [t_end]

use oua::config::preset;
use oua::harness::{default_values, sweep, SweepParam};

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let t_end: f64 = args.next().map(|s| s.parse().expect("t_end")).unwrap_or(200.0);

    let mut config = preset("fig3").expect("preset");
    config.grid.t_end = Some(t_end);
    let seeds: Vec<u64> = (0..n).collect();

    for param in SweepParam::ALL {
        let values = default_values(&config, param);
        let res = sweep(&config, param, &values, &seeds)?;
        println!("{} (no-learning reference {:.2})", param.name(), res.reference);
        for p in &res.points {
            let bar = "#"
                .repeat(((p.mean - res.reference).max(0.0) / res.reference.abs().max(1.0) * 40.0) as usize);
            println!("  {:>9.4}  mean {:>10.2}  min {:>10.2}  {bar}", p.value, p.mean, p.min);
        }
        println!("  best {} = {:.4}", param.name(), res.best().value);
    }
    Ok(())
}
