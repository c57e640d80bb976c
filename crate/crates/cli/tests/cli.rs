use std::process::{Command, Output};

use serde_json::Value;

const EX51: &str = r#"{"kind":"example51","params":{"eps":0.3,"n":3}}"#;

fn kobageo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kobageo")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn polydisk_distance() {
    let out = kobageo(&["distance", "--domain", r#"{"kind":"polydisk","params":{"d":2}}"#, "--from", "0,0", "--to", "0.5,0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "distance");
    let upper = v["result"]["upper"].as_f64().unwrap();
    assert!((upper - 0.549306).abs() <= 0.02 * 0.549306, "{upper}");
}

#[test]
fn moebius_iteration_converges_to_one() {
    let out = kobageo(&["iterate", "--domain", "disk", "--map", "moebius:2,1,1,2", "--seeds", "3", "--N", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["classification"], "boundary-convergent");
    let xi = &r["limit_point"][0];
    assert!((xi[0].as_f64().unwrap() - 1.0).abs() < 1e-6 && xi[1].as_f64().unwrap().abs() < 1e-6, "{xi}");
    assert_eq!(r["asserted_hypotheses"], serde_json::json!(["taut", "visibility"]));
}

#[test]
fn csv_and_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let (j, c) = (dir.path().join("r.json"), dir.path().join("r.csv"));
    let out = kobageo(&[
        "gromov", "--domain", "bidisk", "--adversarial", "--steps", "6",
        "--out-json", j.to_str().unwrap(), "--out-csv", c.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["command"], "gromov");
    let csv = std::fs::read_to_string(&c).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,lower,upper"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["goldilocks", "--domain", "ball", "--eps0", "0.1", "--r-min", "1e-3", "--seed", "7"];
    let (a, b) = (kobageo(&args), kobageo(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(kobageo(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(kobageo(&["metric", "--domain", "disk"]).status.code(), Some(64));

    let bad = kobageo(&["metric", "--domain", r#"{"kind":"ball","params":{"d":0}}"#, "--point", "0", "--direction", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(json(&bad)["error"]["message"].is_string());

    let outside = kobageo(&["metric", "--domain", "disk", "--point", "2,0", "--direction", "1,0"]);
    assert_eq!(outside.status.code(), Some(2));

    let expanding = kobageo(&["iterate", "--domain", "disk", "--map", "moebius:2,0,0,1", "--seeds", "3", "--N", "10"]);
    assert_eq!(expanding.status.code(), Some(2));

    // bound gap near the boundary exceeds kappa
    let gap = kobageo(&["geodesic", "--domain", EX51, "--from", "0,0,0,0.1", "--to", "0,0,0,0.3", "--kappa", "0.01"]);
    assert_eq!(gap.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&gap.stdout).contains("gap"));
}

#[test]
fn complex_and_real_points() {
    let a = json(&kobageo(&["metric", "--domain", "disk", "--point", "0.5,0", "--direction", "1,0"]));
    let b = json(&kobageo(&["metric", "--domain", "disk", "--point", "0.5", "--direction", "1"]));
    assert_eq!(a["result"], b["result"]);
    let k = a["result"]["upper"].as_f64().unwrap();
    assert!((k - 1.0 / 0.75).abs() < 1e-12);
}
