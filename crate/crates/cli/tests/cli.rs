use std::process::{Command, Output};

fn duopoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_duopoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("run.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn baseline_json() -> serde_json::Value {
    serde_json::from_str(include_str!("../configs/baseline.json")).unwrap()
}

#[test]
fn thresholds_csv_matches_the_baseline() {
    let o = duopoly(&["thresholds", "--format", "csv"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["threshold", "value", "annotation", "regime"]
    );
    let values: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    for (got, want) in values.iter().zip([0.37, 0.53, 0.72, 1.83]) {
        assert!((got - want).abs() < 0.01, "{got} vs {want}");
    }
}

#[test]
fn value_json_at_zero() {
    let o = duopoly(&["value", "--y", "0", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["L"], -10.0);
    assert_eq!(v[0]["F"], 0.0);
    assert_eq!(v[0]["S"], -10.0);
    assert_eq!(v[0]["region"], "defer");
}

#[test]
fn sweep_defaults_to_csv_with_stable_header() {
    let o = duopoly(&[
        "sweep", "p1p2", "--y-min", "0.37", "--y-max", "1.83", "--grid", "50",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("y,p1,p2,region\n"));
    assert_eq!(text.lines().count(), 51);
    let o = duopoly(&["sweep", "thresholds_vs_gamma", "--grid", "5"]);
    assert!(stdout(&o).starts_with("gamma,Y1_gamma,Y2_gamma,limit1,limit2\n"));
}

#[test]
fn missing_config_is_a_usage_error_without_output() {
    let o = duopoly(&["--config", "/nonexistent/run.json", "thresholds"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    assert_eq!(duopoly(&["sweep", "nonsense"]).status.code(), Some(1));
    assert_eq!(duopoly(&["value"]).status.code(), Some(1));
    assert_eq!(duopoly(&["value", "--y", "-1"]).status.code(), Some(1));
    assert_eq!(duopoly(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_model_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = baseline_json();
    // delta = eta * lambda - (nu - r) <= 0
    v["model"]["nu"] = serde_json::json!(0.05);
    let path = write_config(&dir, &v.to_string());
    let o = duopoly(&["--config", &path, "thresholds"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());

    let mut v = baseline_json();
    v["law"]["qS"] = serde_json::json!(0.6);
    let path = write_config(&dir, &v.to_string());
    assert_eq!(
        duopoly(&["--config", &path, "regime"]).status.code(),
        Some(2)
    );
}

#[test]
fn regime_of_a_stackelberg_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = baseline_json();
    v["law"] = serde_json::json!({"q0": 0.2, "q1": 0.4, "q2": 0.4, "qS": 0.0});
    let path = write_config(&dir, &v.to_string());
    let o = duopoly(&["--config", &path, "regime", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("regime,stackelberg-fair-coin\n"), "{text}");
    assert!(text.contains("q1,0.5"));
    let o = duopoly(&["--config", &path, "thresholds", "--format", "csv"]);
    assert_eq!(stdout(&o).matches("collapsed").count(), 2);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let args = [
        "simulate", "--y", "0.45", "--paths", "2000", "--seed", "7", "--format", "csv",
    ];
    let a = duopoly(&args);
    let b = duopoly(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("quantity,analytic,empirical,std_err,within_3se\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with('E')).count(), 2);
}

#[test]
fn single_trial_simulation_warns_but_succeeds() {
    let o = duopoly(&["simulate", "--y", "0.45", "--paths", "1"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn horizon_exhaustion_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = baseline_json();
    v["sim"]["horizon"] = serde_json::json!(0.01);
    v["sim"]["max_unsettled_fraction"] = serde_json::json!(0.1);
    let path = write_config(&dir, &v.to_string());
    let o = duopoly(&[
        "--config", &path, "simulate", "--y", "0.1", "--paths", "200",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stdout.is_empty());
}

#[test]
fn gamma_from_config_adds_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = baseline_json();
    v["gamma"] = serde_json::json!(1.0);
    let path = write_config(&dir, &v.to_string());
    let o = duopoly(&["--config", &path, "thresholds", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);
    assert!(rows[4]["value"].as_f64().unwrap() > rows[1]["value"].as_f64().unwrap());
}
