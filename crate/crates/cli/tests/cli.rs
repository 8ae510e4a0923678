//! End-to-end checks of the binary: output shapes and exit codes.

use std::process::Command;

fn e6() -> Command {
    Command::new(env!("CARGO_BIN_EXE_e6"))
}

#[test]
fn eval_reports_legendre_residual() {
    let out = e6().args(["eval", "--tau", "0.5+2i"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["legendre_residual"].as_f64().unwrap() < 1e-9);
    assert!(v["reduced_via"].is_null());
}

#[test]
fn eval_flags_g2_zero_at_the_corner() {
    let out = e6().args(["eval", "--tau", "0.5+0.8660254i"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let flags = v["flags"].as_array().unwrap();
    assert!(flags.iter().any(|f| f == "g2_near_zero"));
}

#[test]
fn eval_low_point_reports_reduction() {
    let out = e6().args(["eval", "--tau", "1e-3+1e-3i"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["reduced_via"].is_array());
}

#[test]
fn critical_counts_match_the_classification() {
    let cases = [
        (vec!["critical", "--group", "gamma02", "--matrix", "1,0,0,1"], 1),
        (vec!["critical", "--group", "gamma02", "--matrix", "1,0,2,1"], 2),
        (vec!["critical", "--group", "sl2z", "--matrix", "1,0,1,1"], 1),
        (vec!["critical", "--group", "sl2z", "--matrix", "1,0,0,1"], 0),
    ];
    for (args, want) in cases {
        let out = e6().args(&args).output().unwrap();
        assert!(out.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["count"].as_u64().unwrap() as usize, want, "{args:?}");
    }
}

#[test]
fn count_command_reports_two_zeros() {
    let out = e6()
        .args(["count", "--family", "fc", "--c", "3", "--domain", "f0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"].as_u64().unwrap(), 2);
    assert!(v["integrality_gap"].as_f64().unwrap() < 0.05);
}

#[test]
fn trace_svg_has_domain_geometry() {
    let out = e6()
        .args(["trace", "--curve", "c2", "--clo", "0.05", "--chi", "50", "--format", "svg"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("viewBox=\"-0.1 0 1.2 3\""));
}

#[test]
fn dense_csv_is_rfc4180() {
    let out = e6()
        .args(["dense", "--group", "gamma02", "--max-denominator", "2", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("curve,C,re_tau,im_tau,half,residual\r\n"));
    assert_eq!(text.lines().count(), 5); // header + four points
}

#[test]
fn usage_errors_exit_2() {
    let out = e6().args(["eval", "--tau", "not-a-number"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = e6().args(["count", "--family", "fc", "--domain", "f0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2)); // missing --c
    let out = e6().args(["bogus-subcommand"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precision_env_override_is_validated() {
    let out = e6()
        .env("E6_PRECISION", "not-a-float")
        .args(["eval", "--tau", "0.5+2i"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
