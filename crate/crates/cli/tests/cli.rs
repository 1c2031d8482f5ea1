use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quadvar::eigenform::eigenform;
use serde_json::Value;

fn quadvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadvar")).args(args).env_remove("QVAR_THETA").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn kloosterman_values_and_usage_errors() {
    let o = quadvar(&["kloosterman", "1", "1", "3"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "-1.000000"));
    let o = quadvar(&["kloosterman", "1", "1", "2"]);
    assert_eq!(stdout(&o).trim(), "1.000000");
    assert_eq!(code(&quadvar(&["kloosterman", "1", "1", "0"])), 1);
    assert_eq!(code(&quadvar(&["kloosterman", "1", "x", "3"])), 1);
    assert_eq!(code(&quadvar(&["no-such-command"])), 1);
    assert_eq!(code(&quadvar(&["--help"])), 0);
}

#[test]
fn kloosterman_grid_csv() {
    let o = quadvar(&["kloosterman", "--grid", "--c-max", "12", "--mn-max", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("m,n,c,"));
    assert_eq!(lines.count(), 12 * 9);
}

#[test]
fn twisted_single_and_suites() {
    let o = quadvar(&["twisted", "1", "0", "1", "0", "0", "2"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "0.000000 + 0.000000i"));
    let o = quadvar(&["twisted", "1", "-16", "21", "0", "0", "15", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["b"], -16);
    assert_eq!(code(&quadvar(&["twisted", "--verify", "vanish", "--c-max", "21"])), 0);
    let o = quadvar(&["twisted", "--verify", "gauss", "--c-max", "31", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["suites"].as_array().unwrap().iter().all(|s| s["passed"] == true));
}

#[test]
fn seeded_output_is_thread_independent() {
    let args = ["twisted", "--verify", "mult", "--cases", "200", "--c-max", "120", "--exhaustive-c", "30", "--format", "json"];
    let one = quadvar(&[&["--threads", "1"][..], &args[..]].concat());
    let again = quadvar(&[&["--threads", "1"][..], &args[..]].concat());
    let four = quadvar(&[&["--threads", "4"][..], &args[..]].concat());
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(code(&quadvar(&["--threads", "0", "kloosterman", "1", "1", "3"])), 1);
}

#[test]
fn bounds_baseline_gate() {
    let dir = tempfile::tempdir().unwrap();
    let low = dir.path().join("low.json");
    fs::write(&low, "{\"bound_sup\": 0.5}").unwrap();
    let args = ["twisted", "--verify", "bounds", "--c-max", "30", "--baseline"];
    assert_eq!(code(&quadvar(&[&args[..], &[low.to_str().unwrap()]].concat())), 2);
    let high = dir.path().join("high.json");
    fs::write(&high, "{\"bound_sup\": 100}").unwrap();
    assert_eq!(code(&quadvar(&[&args[..], &[high.to_str().unwrap()]].concat())), 0);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&quadvar(&[&args[..], &[bad.to_str().unwrap()]].concat())), 3);
}

#[test]
fn petersson_weights_and_imports() {
    assert_eq!(code(&quadvar(&["petersson", "--weight", "24"])), 1);
    assert_eq!(code(&quadvar(&["petersson", "--weight", "12", "--m-max", "4"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let csv = eigenform(16, 100).unwrap().to_csv();
    let good = dir.path().join("good.csv");
    fs::write(&good, &csv).unwrap();
    let o = quadvar(&["petersson", "--import", good.to_str().unwrap(), "--m-max", "5", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let corrupted: String = csv
        .lines()
        .map(|l| if l.starts_with("4,") { "4,1".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, corrupted).unwrap();
    let o = quadvar(&["petersson", "--import", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains('4'));
}

#[test]
fn variance_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "theta = 0.2\n").unwrap();
    assert_eq!(code(&quadvar(&["variance", "--config", cfg.to_str().unwrap()])), 4);
    let o = Command::new(env!("CARGO_BIN_EXE_quadvar")).args(["variance"]).env("QVAR_THETA", "0.2").output().unwrap();
    assert_eq!(code(&o), 4);
    let cfg = dir.path().join("big.cfg");
    fs::write(&cfg, "k = 30\n").unwrap();
    let o = quadvar(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("24"));
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn variance_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = quadvar(&["--out", out.to_str().unwrap(), "variance", "--no-profile"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("report.json"));
    assert_eq!(report, serde_json::from_str::<Value>(&stdout(&o)).unwrap());
    let direct = report["direct"]["value"].as_f64().unwrap();
    let split = report["diagonal"]["value"].as_f64().unwrap() + report["off_diagonal"]["value"].as_f64().unwrap();
    assert!((direct - split).abs() < 1e-4);
    assert_eq!(report["two_route_passed"], true);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "variance");
    assert_eq!(manifest["passed"], true);
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() > 0.0);
    assert!(out.join("report.csv").exists());
}

#[test]
fn stationary_sweep_reports_numeric_failure() {
    let o = quadvar(&["oscillatory", "--identity", "stationary"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("check failed"));
    let o = quadvar(&["oscillatory", "--identity", "bessel-sum", "--x", "0.5,5"]);
    assert_eq!(code(&o), 0);
}
