use oua::config::preset;
use oua::harness::{sweep, Experiment, SweepParam};

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn runs_identical_across_thread_counts() {
    for (name, t_end) in [("fig7", 30.0), ("fig8", 30.0), ("fig4", 10.0)] {
        let mut c = preset(name).unwrap();
        c.grid.t_end = Some(t_end);
        let exp = Experiment::new(c).unwrap();
        let seeds: Vec<u64> = (0..6).collect();
        let a = pool(1).install(|| exp.run_all(&seeds));
        let b = pool(5).install(|| exp.run_all(&seeds));
        assert_eq!(a.records().count(), b.records().count(), "{name}");
        for (x, y) in a.records().zip(b.records()) {
            assert_eq!(x.trajectory, y.trajectory, "{name}");
            assert_eq!(x.summary.g_final.to_bits(), y.summary.g_final.to_bits());
        }
        assert_eq!(a.failures, b.failures);
    }
}

#[test]
fn sweep_identical_across_thread_counts() {
    let mut c = preset("fig3").unwrap();
    c.grid.t_end = Some(10.0);
    let values = [0.1, 1.0, 10.0];
    let a = pool(1).install(|| sweep(&c, SweepParam::Eta, &values, &[0, 1, 2]).unwrap());
    let b = pool(3).install(|| sweep(&c, SweepParam::Eta, &values, &[0, 1, 2]).unwrap());
    assert_eq!(a, b);
}
