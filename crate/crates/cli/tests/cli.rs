use std::process::{Command, Output};

use serde_json::Value;

fn logcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logcap"))
        .args(args)
        .env_remove("LOGCAP_THREADS")
        .output()
        .expect("run logcap")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "status {:?}, stderr {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&logcap(args))).unwrap()
}

#[test]
fn cap_abel_on_reference_interval() {
    let v = json(&["cap", "--bands", "[[-2,2]]", "--method", "abel"]);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(v["method"], "abel_integral");
    assert!(v["tolerance"].as_f64().unwrap() > 0.0);
}

#[test]
fn cap_all_methods_csv() {
    let s = stdout(&logcap(&[
        "cap", "--bands", "[[-2,2]]", "--method", "all", "--format", "csv",
    ]));
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("method,value,tolerance"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 3);
    for row in rows {
        let mut cols = row.split(',');
        let method = cols.next().unwrap();
        let value: f64 = cols.next().unwrap().parse().unwrap();
        if method == "fekete" {
            // d_n decreases to the capacity from above.
            assert!(value > 1.0 && value < 2.0, "{row}");
        } else {
            assert!((value - 1.0).abs() < 1e-3, "{row}");
        }
    }
}

#[test]
fn eqm_samples_include_center_density() {
    let s = stdout(&logcap(&["eqm", "--bands", "[[-2,2]]", "--samples", "5"]));
    let center = s.lines().find_map(|l| l.strip_prefix("0,")).expect("row at x = 0");
    let v: f64 = center.parse().unwrap();
    assert!((v - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn robinson_reference_preset() {
    let v = json(&["robinson", "--preset", "x2m6", "--degree", "16"]);
    let run = &v["runs"][0];
    assert_eq!(run["degree"], 16);
    let coeffs: Vec<&str> = run["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(coeffs.len(), 17);
    assert_eq!(*coeffs.last().unwrap(), "1");
    assert!(coeffs.iter().all(|c| c.parse::<i128>().is_ok()));
    assert!(v["method"].is_string() && v["tolerance"].is_number());
    assert_eq!(run["certificate"]["intervals"].as_array().unwrap().len(), 16);
}

#[test]
fn robinson_convergence_table_csv() {
    let s = stdout(&logcap(&[
        "robinson", "--preset", "x2m6", "--table", "2,4,8", "--format", "csv",
    ]));
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "n,degree,kolmogorov_distance");
    let d: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(d.len(), 3);
    assert!(d.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn pell_construct_on_symmetric_pair() {
    let bands = format!(
        "[[{},{}],[{},{}]]",
        -8f64.sqrt(),
        -2f64.sqrt(),
        2f64.sqrt(),
        8f64.sqrt()
    );
    let v = json(&["pell", "construct", "--bands", &bands, "--r", "2"]);
    let text = v.to_string();
    assert!(text.contains("X^2 - 5") || text.contains("\"-5\""), "{text}");
}

#[test]
fn weil_lift_and_bound() {
    let v = json(&["weil", "lift", "--q", "2", "--coeffs", "[-1,1]"]);
    assert_eq!(v["lift"], serde_json::json!(["2", "-1", "1"]));
    assert_eq!(v["modulus_ok"], true);
    assert_eq!(v["pushforward"], true);
    let v = json(&["weil", "bound", "--q", "2"]);
    assert!((v["bound"].as_f64().unwrap() - 2f64.powf(0.25)).abs() < 1e-12);
    assert!((v["cap"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-10);
    assert_eq!(v["satisfied"], true);
}

#[test]
fn malformed_bands_exit_two() {
    let out = logcap(&["cap", "--bands", "[[2,1]]"]);
    assert_eq!(out.status.code(), Some(2));
    let out = logcap(&["cap", "--bands", "not json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = logcap(&["cap", "--bands", "[[-2,2]]", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certification_failure_exits_three() {
    let out = logcap(&[
        "robinson",
        "--p",
        "[-5,0,1]",
        "--m",
        "5/2",
        "--degree",
        "4",
        "--degree-cap",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divisibility"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["cap", "--bands", "[[0,1],[1.5,2],[3,4]]", "--method", "all"][..],
        &["fekete", "--bands", "[[-2,-0.5],[0.5,2]]", "-n", "7"][..],
        &["energy", "--bands", "[[0,1],[2,3]]", "--measure", "uniform"][..],
        &["robinson", "--preset", "x2m5", "--degree", "3"][..],
    ] {
        let a = logcap(args);
        let b = logcap(args);
        assert_eq!(stdout(&a), stdout(&b), "{args:?}");
    }
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let args = ["cap", "--bands", "[[0,1],[1.5,2],[3,4],[5,5.2]]", "--method", "all"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_logcap"))
            .args(args)
            .env("LOGCAP_THREADS", threads)
            .output()
            .unwrap();
        stdout(&out)
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn problem_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.json");
    std::fs::write(
        &path,
        r#"{"bands": [[-2, 2]], "method": "abel", "tolerance": 1e-9, "m": "5/2", "p": ["-6", "0", "1"]}"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();
    let first = stdout(&logcap(&["cap", "--problem", path, "--print-problem"]));
    let again = dir.path().join("again.json");
    std::fs::write(&again, &first).unwrap();
    let second = stdout(&logcap(&[
        "cap",
        "--problem",
        again.to_str().unwrap(),
        "--print-problem",
    ]));
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["m"], "5/2");
}

#[test]
fn flags_override_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"bands": [[0, 4]], "method": "closed-form"}"#).unwrap();
    let v = json(&["cap", "--problem", path.to_str().unwrap(), "--bands", "[[-2,2]]"]);
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap.json");
    let out = logcap(&[
        "-o",
        path.to_str().unwrap(),
        "cap",
        "--bands",
        "[[-2,2]]",
        "--method",
        "closed-form",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["value"], 1.0);
}
