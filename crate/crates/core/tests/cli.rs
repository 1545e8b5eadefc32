use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn jelab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jelab"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("JELAB_SEED")
        .output()
        .expect("jelab runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn je_run_fig4_grid() {
    let dir = TempDir::new().unwrap();
    let o = jelab(dir.path(), &["je-run", "--preset", "paper-fig4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("je_run.csv")).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# jelab je-run seed="), "{header}");
    assert!(header.contains("\"preset\":\"paper-fig4\""));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 15);
    for r in &rows {
        assert!(r[4].abs() < 1e-8, "{r:?}");
    }
    let rhs: Vec<f64> = rows.iter().filter(|r| r[0] == 0.7).map(|r| r[3]).collect();
    assert!(rhs.iter().all(|x| (x - rhs[0]).abs() < 1e-14));
}

#[test]
fn channel_preset_deviation_bounded() {
    let dir = TempDir::new().unwrap();
    let o = jelab(dir.path(), &["channel", "--preset", "paper-fig-s7-f90", "--n-steps", "4000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("deviation.csv")).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[4].abs() <= 0.1), "{rows:?}");
    let table = std::fs::read_to_string(dir.path().join("channel.csv")).unwrap();
    assert_eq!(table.lines().count(), 2 + 27);
}

#[test]
fn seeded_traces_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let args = ["traces", "--seed", "42", "--n-traces", "3", "--n-bundles", "3000"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = jelab(dir.path(), &args);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(["trace.csv", "histogram.csv"].map(|f| std::fs::read(dir.path().join(f)).unwrap()));
    }
    assert!(runs[0] == runs[1]);
}

#[test]
fn seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_jelab"))
        .args(["adiabaticity", "--tau-us", "200", "--output-dir"])
        .arg(dir.path())
        .env("JELAB_SEED", "777")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("adiabaticity.csv")).unwrap();
    assert!(text.starts_with("# jelab adiabaticity seed=777 "));
}

#[test]
fn config_file_layers_under_cli() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"preset": "paper-fig4", "tau_us": [50, 200], "n_steps": 3000}"#).unwrap();
    let o = jelab(dir.path(), &["je-run", "--config", cfg.to_str().unwrap(), "--beta", "0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&std::fs::read_to_string(dir.path().join("je_run.csv")).unwrap());
    let grid: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(grid, vec![(0.5, 50.0), (0.5, 200.0)]);
}

#[test]
fn mc_zero_sigma_gives_zero_spread() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("joint.json");
    std::fs::write(
        &input,
        r#"{"probabilities": [[0.3, 0.0, 0.0], [0.0, 0.4, 0.0], [0.0, 0.0, 0.3]],
            "sigmas": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}"#,
    )
    .unwrap();
    let o = jelab(dir.path(), &["mc", "--input", input.to_str().unwrap(), "--runs", "250", "--seed", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mc_summary.json")).unwrap()).unwrap();
    assert_eq!(v["K"], 250);
    assert_eq!(v["seed"], 9);
    for k in ["beta_exp_std", "beta_abs_lambda_std", "lhs_std", "rhs_std"] {
        assert_eq!(v[k].as_f64().unwrap(), 0.0, "{k}");
    }
}

#[test]
fn mc_rejects_malformed_input() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("bad.json");
    std::fs::write(&input, "{\"probabilities\": [[0.3, 0.0]\n").unwrap();
    let o = jelab(dir.path(), &["mc", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");

    std::fs::write(&input, r#"{"probabilities": [[1,0,0],[0,0,0],[0,0,0]], "sigma": 1}"#).unwrap();
    let o = jelab(dir.path(), &["mc", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sigma"));
}

#[test]
fn mc_needs_enough_runs() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("joint.json");
    std::fs::write(&input, r#"{"counts": [[30, 1, 0], [2, 40, 1], [0, 1, 25]]}"#).unwrap();
    let o = jelab(dir.path(), &["mc", "--input", input.to_str().unwrap(), "--runs", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let o = jelab(dir.path(), &["je-run", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("paper-fig4"));
}

#[test]
fn invalid_values_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["je-run", "--tau-us", "-5"][..],
        &["je-run", "--beta", "-0.1"],
        &["channel", "--readout-fidelity", "1.5"],
        &["channel", "--readout-fidelity", "0.9", "--jump-preset", "f98"],
    ] {
        let o = jelab(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn rwa_guard_violation_exits_three() {
    let dir = TempDir::new().unwrap();
    let o = jelab(dir.path(), &["rwa-check", "--tau-us", "5", "--carrier-ratio", "10"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn degenerate_traces_exit_three() {
    let dir = TempDir::new().unwrap();
    let o = jelab(dir.path(), &["readout-calibrate", "--n-traces", "1", "--n-bundles", "3", "--b-max", "5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
