use std::path::Path;
use std::process::{Command, Output};

fn choquet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choquet")).args(args).env_remove("CHOQUET_WORKERS").output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn field(text: &str, name: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(name)).unwrap_or_else(|| panic!("no `{name}` in {text}"));
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn integrate_power_half() {
    let out = choquet(&["integrate", "-f", "t", "-d", "power:0.5", "-i", "0", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!((field(&text, "value") - 2.0 / 3.0).abs() < 1e-3);
    assert!(field(&text, "difference").abs() < 1e-3);
}

#[test]
fn integrate_constant_and_errors() {
    let out = choquet(&["integrate", "-f", "3", "-d", "moebius", "-i", "0", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(field(&stdout(&out), "value"), 3.0);

    let out = choquet(&["integrate", "-f", "log(t)", "-i", "0", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("t = 0"), "{}", stderr(&out));

    let out = choquet(&["integrate", "-f", "2*^t"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("offset 2"), "{}", stderr(&out));
}

#[test]
fn operator_closed_form_and_constants() {
    let out = choquet(&[
        "operator",
        "-F",
        "bernstein",
        "-n",
        "10",
        "-d",
        "identity",
        "-f",
        "t",
        "--grid",
        "11",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rows = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rows.headers().unwrap(), vec!["x", "value"]);
    let mut count = 0;
    for row in rows.records() {
        let row = row.unwrap();
        let (x, v): (f64, f64) = (row[0].parse().unwrap(), row[1].parse().unwrap());
        assert!((v - (20.0 * x + 1.0) / 22.0).abs() < 1e-6);
        count += 1;
    }
    assert_eq!(count, 11);

    let out = choquet(&["operator", "-F", "bernstein", "-n", "5", "-f", "1"]);
    assert_eq!(code(&out), 0);
    let mut rows = csv::Reader::from_reader(out.stdout.as_slice());
    for row in rows.records() {
        assert!((row.unwrap()[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn operator_errors() {
    let out = choquet(&["operator", "-F", "szasz", "-n", "8", "-f", "t", "--window", "0", "4", "--domain-max", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("too small"), "{}", stderr(&out));

    let out = choquet(&["operator", "-F", "legendre", "-n", "3", "-f", "t"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("legendre"));
}

#[test]
fn korovkin_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rows.csv");
    let out = choquet(&["korovkin", "-f", "abs(t-0.5)", "-d", "moebius", "-o", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("family,distortion,c,n,x,fx,knfx,abs_error,delta,bound,holds"));
    // 7 degrees x 51 points
    assert_eq!(text.lines().count(), 1 + 7 * 51);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(csv_path.with_extension("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["totals"]["violations"], 0);
    assert_eq!(summary["totals"]["rows"], 357);
}

#[test]
fn korovkin_exit_codes() {
    let out = choquet(&["korovkin", "-f", "t-2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nonnegative"), "{}", stderr(&out));

    let out = choquet(&["korovkin", "-f", "t^2", "-d", "identity", "-c", "1", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let out = choquet(&["korovkin", "-f", "t", "-d", "power:0.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("no finite c"), "{}", stderr(&out));
}

fn write_table(dir: &Path) -> String {
    let path = dir.join("convex.csv");
    std::fs::write(&path, "t,u\n0,0\n0.5,0.2\n1,1\n").unwrap();
    format!("table:{}", path.display())
}

#[test]
fn properties_are_deterministic_and_gate_non_submodular() {
    let first = choquet(&["properties", "--seed", "7", "--trials", "40", "-d", "identity"]);
    let second = choquet(&["--workers", "3", "properties", "--seed", "7", "--trials", "40", "-d", "identity"]);
    assert_eq!(code(&first), 0, "{}", stdout(&first));
    assert_eq!(first.stdout, second.stdout);

    let dir = tempfile::tempdir().unwrap();
    let spec = write_table(dir.path());
    let out = choquet(&["properties", "--seed", "7", "--trials", "40", "-d", &spec]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = doc["integral"]["checks"].as_array().unwrap();
    let status = |name: &str| checks.iter().find(|c| c["name"] == name).unwrap()["status"].clone();
    assert_eq!(status("subadditivity"), "skipped");
    assert_eq!(status("positivity"), "passed");
    for suite in doc["suites"].as_array().unwrap() {
        assert_eq!(suite["status"], "skipped");
    }
}

#[test]
fn capacity_tables() {
    let out = choquet(&["capacity", "-d", "moebius", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["c"]["c"].as_f64().unwrap() - 4.0).abs() <= 0.05);
    for row in doc["table"].as_array().unwrap() {
        let x = row["x"].as_f64().unwrap();
        assert!((row["dual"].as_f64().unwrap() - x / (2.0 - x)).abs() < 1e-12);
    }

    let out = choquet(&["capacity", "-d", "identity"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("c           1 "));

    let out = choquet(&["capacity", "-d", "power:0.5", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["c"]["kind"], "unbounded");

    assert_eq!(code(&choquet(&["capacity", "-d", "bogus"])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"subcommand": "operator", "family": "bernstein", "n": [4], "expression": "t", "grid": 3}"#,
    )
    .unwrap();
    let out = choquet(&["--config", cfg.to_str().unwrap(), "operator"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 4);
    // flag beats file
    let out = choquet(&["--config", cfg.to_str().unwrap(), "operator", "--grid", "5"]);
    assert_eq!(stdout(&out).lines().count(), 6);
    // the file belongs to another subcommand
    let out = choquet(&["--config", cfg.to_str().unwrap(), "capacity", "-d", "identity"]);
    assert_eq!(code(&out), 2);

    std::fs::write(&cfg, r#"{"famly": "bernstein"}"#).unwrap();
    assert_eq!(code(&choquet(&["--config", cfg.to_str().unwrap(), "operator"])), 2);
}

#[test]
fn workers_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(["operator", "-F", "bernstein", "-n", "3", "-f", "t", "--grid", "3"])
        .env("CHOQUET_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_choquet"))
        .args(["capacity", "-d", "identity"])
        .env("CHOQUET_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
