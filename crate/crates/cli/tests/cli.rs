use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use toricstab::filtrations::DHMeasure;
use toricstab::rational::ratio;
use toricstab::thresholds::ThresholdReport;

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../problems")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricstab"))
        .args(args)
        .output()
        .expect("spawn toricstab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is one JSON object")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn delta_on_p2_headline() {
    let p = problem("p2.json");
    let o = run(&["delta", arg(&p), "--radius", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        stdout(&o).lines().next(),
        Some("delta = 1 (exact) at u=(1,0)")
    );
}

#[test]
fn bad_fan_is_a_validation_error() {
    let p = problem("bad_fan.json");
    let o = run(&["validate", arg(&p)]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_json(&o);
    assert_eq!(e["error"]["kind"], "invalid_fan");
    assert!(e["error"]["message"]
        .as_str()
        .unwrap()
        .contains("fan not complete"));
    assert!(o.stdout.is_empty());
}

#[test]
fn curve_functionals_on_p2() {
    let p = problem("p2.json");
    let o = run(&[
        "curve",
        arg(&p),
        "--direction",
        "H",
        "--functionals",
        "E,Jt,Ent",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(lines, ["E = 1", "Jt = 1", "Ent = 1"]);
}

#[test]
fn curve_json_has_exact_strings() {
    let p = problem("p2.json");
    let o = run(&["--format", "json", "curve", arg(&p), "--direction", "H"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["Ealpha"], "3/2");
    assert_eq!(v["ER"], "-3");
    assert_eq!(v["Mt"], "-2");
    assert_eq!(v["tau_plus"], "3");
}

#[test]
fn output_is_deterministic() {
    let p = problem("f1.json");
    for fmt in ["table", "json", "csv"] {
        let a = run(&[
            "--format",
            fmt,
            "--jobs",
            "3",
            "report",
            arg(&p),
            "--radius",
            "2",
        ]);
        let b = run(&[
            "--format",
            fmt,
            "--jobs",
            "1",
            "report",
            arg(&p),
            "--radius",
            "2",
        ]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "format {fmt}");
    }
}

#[test]
fn report_json_round_trips() {
    let p = problem("f1.json");
    let o = run(&[
        "--format",
        "json",
        "report",
        arg(&p),
        "--directions",
        "E,F",
        "--radius",
        "2",
    ]);
    let r: ThresholdReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.delta, ratio(6, 7));
    assert!(r.all_hold());
    assert_eq!(
        serde_json::to_value(&r).unwrap(),
        serde_json::from_slice::<Value>(&o.stdout).unwrap()
    );
}

#[test]
fn dh_json_round_trips_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("dh.svg");
    let p = problem("p2.json");
    let o = run(&[
        "--format",
        "json",
        "dh",
        arg(&p),
        "--u=1,0",
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let nu: DHMeasure = DHMeasure {
        density: serde_json::from_value(v["density"].clone()).unwrap(),
        atoms: serde_json::from_value(v["atoms"].clone()).unwrap(),
    };
    assert_eq!(nu.total_mass(), ratio(1, 1));
    assert_eq!(v["energy"], "1");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains("polyline"));
}

#[test]
fn volume_of_a_curve_and_a_divisor() {
    let p = problem("f1.json");
    let o = run(&["volume", arg(&p), "--curve", "E"]);
    assert!(stdout(&o).contains("8 - 2*t - t^2"));
    let o = run(&["--format", "csv", "volume", arg(&p), "--divisor", "H"]);
    assert_eq!(stdout(&o), "divisor,volume\nH,1\n");
}

#[test]
fn computation_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neg.json");
    std::fs::write(
        &path,
        r#"{"fan": {"rays": [[1,0],[0,1],[-1,-1]], "cones": [[0,1],[1,2],[2,0]]},
            "polarization": "anticanonical", "divisors": {"N": {"coeffs": ["-1", 0, 0]}}}"#,
    )
    .unwrap();
    let o = run(&["curve", path.to_str().unwrap(), "--direction", "N"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_json(&o)["error"]["stage"], "computation");
}

#[test]
fn input_errors_exit_two() {
    let p = problem("p2.json");
    let cases: [&[&str]; 5] = [
        &["delta", "/nonexistent/problem.json"],
        &["curve", arg(&p), "--direction", "Q"],
        &[
            "curve",
            arg(&p),
            "--direction",
            "H",
            "--functionals",
            "E,Bogus",
        ],
        &["dh", arg(&p), "--u=0,0"],
        &["delta", arg(&p), "--radius", "0"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&o)["error"]["stage"], "validation");
    }
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"fan\": [").unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "parse");
}
