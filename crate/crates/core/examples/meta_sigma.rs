//! Learning the exploration magnitude σ alongside θ. The teacher flips sign
//! halfway; σ should grow after the switch and shrink again once the new
//! target is found. Compared with a fixed σ.
//!
//! cargo run --release --example meta_sigma [n_seeds] [meta_diffusion]

use oua::config::preset;
use oua::harness::{mean, window_mean, Experiment};

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let mut config = preset("fig8").expect("preset");
    if let Some(d) = args.next() {
        config.meta.meta_diffusion = Some(d.parse().expect("meta_diffusion"));
    }
    let switch = config.task.switch_time.expect("switch");
    let t_end = config.grid.t_end.expect("t_end");
    let frac = |t: f64| t / t_end;
    let seeds: Vec<u64> = (0..n).collect();
    let res = Experiment::new(config)?.run_all(&seeds);

    println!("seed  σ before  σ after  μ(T)     G(T) learned σ  G(T) fixed σ");
    for (l, f) in res.learning.iter().zip(&res.fixed_sigma) {
        let sig = l.series("sigma").expect("sigma recorded");
        let before = window_mean(l.times(), &sig, frac(switch - 20.0), frac(switch));
        let after = window_mean(l.times(), &sig, frac(switch), frac(switch + 20.0));
        println!(
            "{:>4}  {before:>8.3}  {after:>7.3}  {:+.3}   {:>12.2}  {:>12.2}",
            l.summary.seed, l.summary.mu_final[0], l.summary.g_final, f.summary.g_final
        );
    }
    let fixed: Vec<f64> = res.fixed_sigma.iter().map(|r| r.summary.g_final).collect();
    println!("mean G(T): learned σ {:.2}, fixed σ {:.2}", res.mean_return(), mean(&fixed));
    Ok(())
}
