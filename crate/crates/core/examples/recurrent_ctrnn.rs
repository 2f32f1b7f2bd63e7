//! Learning the three weights of a continuous-time recurrent unit from a
//! teacher unit, then scoring the learned mean with exploration switched off.
//!
//! cargo run --release --example recurrent_ctrnn [n_seeds] [eta]
//!
//! The default η = 50 is aggressive for this model and some seeds blow up;
//! those are reported rather than hidden. Try η = 5 for a stable run.

use oua::config::preset;
use oua::harness::Experiment;

fn main() -> oua::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map(|s| s.parse().expect("n_seeds")).unwrap_or(5);
    let mut config = preset("fig4").expect("preset");
    if let Some(eta) = args.next() {
        config.hyper.eta = eta.parse().expect("eta");
    }
    let seeds: Vec<u64> = (0..n).collect();
    let res = Experiment::new(config.clone())?.run_all(&seeds);

    println!("teacher θ* = {:?}, η = {}", config.task.teacher, config.hyper.eta);
    for r in &res.learning {
        let s = &r.summary;
        let fm = res.frozen_mean.iter().find(|f| f.summary.seed == s.seed);
        println!(
            "seed {:>2}  μ(T) = [{}]  G(T) = {:.3}  frozen-mean G(T) = {}",
            s.seed,
            s.mu_final.iter().map(|m| format!("{m:+.3}")).collect::<Vec<_>>().join(", "),
            s.g_final,
            fm.map(|f| format!("{:.3}", f.summary.g_final)).unwrap_or_else(|| "-".into())
        );
    }
    for f in &res.failures {
        println!("seed {:>2}  {} run failed: {}", f.seed, f.mode, f.error);
    }
    Ok(())
}
