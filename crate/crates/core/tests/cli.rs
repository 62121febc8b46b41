//! Exit codes and output formats of the `gravham` binary.

use std::process::Command;

fn gravham(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gravham")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn verify_passes_by_default() {
    let (code, text) = gravham(&["verify", "--samples", "10"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn injected_fault_exits_one() {
    let (code, text) = gravham(&["verify", "--samples", "10", "--fault", "flip-b-sign"]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn dimension_two_is_a_structured_error() {
    let (code, _) = gravham(&["verify", "--d", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(gravham(&["verify", "--tol", "-1"]).0, 2);
    assert_eq!(gravham(&["no-such-command"]).0, 2);
}

#[test]
fn json_report_is_well_formed() {
    let (code, text) = gravham(&["--format", "json", "dof", "--d", "4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(v["command"], "dof");
    assert_eq!(v["checks"][0]["status"], "pass");
}

#[test]
fn degrees_report_text() {
    let (code, text) = gravham(&["degrees", "--d", "4"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("10 = 4 + 3 + 3"));
    assert!(text.contains("not all-quadratic"));
}
