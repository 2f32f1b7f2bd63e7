use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oua::config::{load_config, preset, PRESETS};
use oua::data::SyntheticWeather;

fn oua(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oua"))
        .args(args)
        .env_remove("OUA_SEED")
        .env_remove("OUA_WEATHER_CSV")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn run_writes_results_and_summary_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = oua(&[
        "run",
        "--preset",
        "fig2",
        "--seeds",
        "0..2",
        "--set",
        "t_end=5",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o);
    assert!(line.starts_with("task=single seeds=3 mean_G_T="), "{line}");
    assert!(line.contains("baseline_G_T="));
    for f in ["run_single_0.csv", "run_single_2_baseline.csv", "summary.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(manifest(&out)["seeds"], serde_json::json!([0, 1, 2]));
}

#[test]
fn missing_config_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = oua(&["run", "--config", "/definitely/not/here.toml", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn invalid_values_are_reported_together() {
    let o = oua(&["run", "--preset", "fig2", "--set", "hyper.sigma=-1", "--set", "lambda=-2", "--dry-run"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("sigma") && err.contains("lambda"), "{err}");
}

#[test]
fn unknown_key_exits_1() {
    let o = oua(&["run", "--preset", "fig2", "--set", "hyper.kappa=3", "--dry-run"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kappa"));
}

#[test]
fn missing_weather_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = oua(&["weather", "--data", "/no/such/weather.csv", "--output-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn diverging_run_exits_3() {
    // Seed 1 of the recurrent setup blows up within the first 20 time units.
    let dir = tempfile::tempdir().unwrap();
    let o = oua(&[
        "run",
        "--preset",
        "fig4",
        "--seeds",
        "1",
        "--set",
        "t_end=20",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("failed_runs=1"));
    assert_eq!(manifest(dir.path())["failures"][0]["numerical"], true);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_oua"));
        c.args(["run", "--preset", "fig2", "--set", "t_end=1", "--output-dir", out]).args(extra);
        c.env_remove("OUA_SEED");
        if let Some(s) = env {
            c.env("OUA_SEED", s);
        }
        assert_eq!(c.output().unwrap().status.code(), Some(0));
        manifest(dir.path())["seeds"].clone()
    };
    assert_eq!(run(None, &[]), serde_json::json!((0..15).collect::<Vec<u64>>()));
    assert_eq!(run(Some("7"), &[]), serde_json::json!([7]));
    assert_eq!(run(Some("7"), &["--set", "run.seeds=[4, 5]"]), serde_json::json!([4, 5]));
    assert_eq!(run(Some("7"), &["--set", "run.seeds=[4, 5]", "--seeds", "9"]), serde_json::json!([9]));
}

#[test]
fn dry_run_prints_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let o = oua(&["sdi", "--dry-run", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cfg = oua::config::config_from_str(&stdout(&o), &[]).unwrap();
    assert_eq!(cfg.task.kind, oua::config::TaskKind::Sdi);
    assert!(!out.exists());
}

#[test]
fn sweep_writes_one_row_per_value_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = oua(&[
        "sweep",
        "--preset",
        "fig3",
        "--param",
        "sigma",
        "--values",
        "0.1,0.3,1",
        "--seeds",
        "0,1",
        "--set",
        "t_end=5",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(dir.path().join("sweep_summary.csv").exists());
}

#[test]
fn meta_and_weather_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("meta");
    let o = oua(&["meta", "--seeds", "0", "--set", "t_end=5", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fixed_sigma_G_T="));

    let out = dir.path().join("weather");
    let o = oua(&["weather", "--synthetic", "1500", "--seeds", "0", "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("test_pearson="));
    assert!(out.join("weather_test_0.csv").exists());
}

#[test]
fn validate_data_writes_cache() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    SyntheticWeather { hours: 24 * 40, ..Default::default() }.write_file(&csv).unwrap();
    let out = dir.path().join("cache");
    let o = oua(&["validate-data", "--data", csv.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("rows_read=960"));
    assert!(out.join("weather_clean.csv").exists() && out.join("weather_manifest.json").exists());
}

#[test]
fn shipped_configs_match_presets() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in PRESETS {
        let file = load_config(&root.join(format!("{name}.toml")), &[]).unwrap();
        assert_eq!(file, preset(name).unwrap(), "{name}");
    }
}
