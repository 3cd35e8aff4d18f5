use std::process::{Command, Output};

use serde_json::Value;

fn hardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const CUBE: &str = r#"{"kind":"poly","coeffs":[0,0,0,1]}"#;
const IDENTITY: &str = r#"{"kind":"poly","coeffs":[0,1]}"#;
const ONE: &str = r#"{"kind":"poly","coeffs":[1]}"#;
const HALF: &str = r#"{"kind":"poly","coeffs":[0,0.5]}"#;

#[test]
fn norm_of_cube_in_s2p() {
    let out = hardylab(&["norm", "--space", "s2p", "--p", "2", CUBE]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "6.0\n");
}

#[test]
fn function_files_are_read() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    std::fs::write(&path, CUBE).unwrap();
    let out = hardylab(&["norm", "--space", "hp", "--p", "2", path.to_str().unwrap()]);
    assert_eq!(stdout(&out), "1.0\n");
}

#[test]
fn criterion_for_identity_map_is_one() {
    let out = hardylab(&["criterion", "--phi", IDENTITY, "--weight", ONE, "--p", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sup = report["sup_estimate"].as_f64().unwrap();
    assert!((sup - 1.0).abs() <= 1e-8, "{sup}");
    assert_eq!(report["levels"].as_array().unwrap().len(), 12);
    assert_eq!(report["flags"]["sup_finite_consistent"], Value::Bool(true));
}

#[test]
fn criterion_csv_lists_samples() {
    let out = hardylab(&[
        "criterion",
        "--levels",
        "3",
        "--phi",
        HALF,
        "--weight",
        ONE,
        "--p",
        "2",
        "--csv",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a_re,a_im,lambda"));
    // Level 0 is the single center a = 0.
    assert!(lines.count() >= 1 + 128 + 256);
}

#[test]
fn apply_composition() {
    let op = r#"{"kind":"comp","phi":{"kind":"poly","coeffs":[0,0.5]}}"#;
    let f = r#"{"kind":"poly","coeffs":[0,0,1]}"#;
    let out = hardylab(&["apply", op, f]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], "poly");
    assert_eq!(v["coeffs"][2], serde_json::json!([0.25, 0.0]));
    assert_eq!(v["decl_radius"], Value::Null);
}

#[test]
fn reports_and_traces() {
    let out = hardylab(&["report", "s2p", "--levels", "4", "--phi", HALF, "--psi", ONE]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["bounded_consistent"], Value::Bool(true));

    let out = hardylab(&[
        "report",
        "compactness",
        "--levels",
        "4",
        "--phi",
        HALF,
        "--psi",
        ONE,
        "--csv",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("weight,eps,kappa\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 4);

    let out = hardylab(&["report", "composition", "--levels", "4", "--phi", HALF]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn opnorm_methods() {
    let op = r#"{"kind":"comp","phi":{"kind":"poly","coeffs":[0,0.5]}}"#;
    let out = hardylab(&["opnorm", "--method", "matrix", "--norm", "h2", "--basis", "16", op]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = hardylab(&["opnorm", "--method", "testfns", "--degree", "64", op]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.json");
    let out = hardylab(&["catalog", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(v.as_array().unwrap().len() >= 20);
}

#[test]
fn usage_errors_exit_two() {
    let cases: [(&[&str], &str); 7] = [
        (&["frobnicate"], "unrecognized subcommand"),
        (&["norm", "--space", "s2p", "--p", "0.5", CUBE], "exponent p = 0.5"),
        (&["norm", "--space", "s2p", "{not json"], "invalid spec"),
        (
            &["norm", "--space", "s2p", "/nonexistent/f.json"],
            "cannot read spec file",
        ),
        (
            &[
                "criterion",
                "--phi",
                r#"{"kind":"poly","coeffs":[0,2]}"#,
                "--weight",
                ONE,
                "--p",
                "2",
            ],
            "not a self-map",
        ),
        (&["report", "s2p", "--phi", HALF], "requires --psi"),
        (
            &["criterion", "--phi", HALF, "--weight", ONE, "--p", "2", "--q", "1"],
            "q >= p",
        ),
    ];
    for (args, message) in cases {
        let out = hardylab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(message), "{args:?}: {}", stderr(&out));
    }
    let out = hardylab(&["norm", "--samples", "1000", "--space", "hp", CUBE]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("power of two"));
    let out = hardylab(&[
        "criterion",
        "--levels",
        "17",
        "--phi",
        HALF,
        "--weight",
        ONE,
        "--p",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_fails_with_exit_one_on_a_mismatched_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("baseline.json");
    let golden = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/baseline.json")).unwrap();
    let mut v: Value = serde_json::from_str(&golden).unwrap();
    v["values"]["volterra.sufficiency.p2"]["value"] = serde_json::json!(0.5);
    std::fs::write(&path, v.to_string()).unwrap();
    let out = hardylab(&[
        "verify",
        "--samples",
        "1024",
        "--degree",
        "128",
        "--levels",
        "4",
        "--golden",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let failed: Vec<&str> = report["sections"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["checks"].as_array().unwrap())
        .filter(|c| c["passed"] == Value::Bool(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"baseline_settings"), "{failed:?}");
    assert!(failed.contains(&"baseline.volterra.sufficiency.p2"), "{failed:?}");
}
