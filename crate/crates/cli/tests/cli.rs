//! End-to-end checks of the `deflate` binary: grammar, methods, output
//! formats, and exit codes.

use std::io::Write;
use std::process::{Command, Output};

fn deflate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deflate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("deflate-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

const PAIR: &str = "# multiplicity-2 example\nvars x1 x2\npoly x1 + x2^2\npoly x1^2 + x2^2\npoint 0 0\n";

#[test]
fn determinantal_pipeline_succeeds() {
    let path = write_temp("pair.sys", PAIR);
    let out = deflate(&[
        "--method",
        "determinantal",
        "--input",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verified simple root: true"));
    assert!(text.contains("counts: 3 polynomials, 2 unknowns, 1 iterations"));
}

#[test]
fn dual_only_json_schema() {
    let path = write_temp("pair_json.sys", PAIR);
    let out = deflate(&[
        "--method",
        "dual-only",
        "--input",
        path.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["multiplicity"], 2);
    assert_eq!(v["nil_index"], 1);
    assert_eq!(v["breadth"], 1);
    let e = v["e_set"].as_array().unwrap();
    assert_eq!(e.len(), 2);
    assert!(v["timings_ms"].is_object());
}

#[test]
fn mu_pipeline_on_family() {
    let out = deflate(&[
        "--method",
        "mu",
        "--family-n",
        "2",
        "--output",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["multiplicity"], 4);
    assert_eq!(v["breadth"], 2);
    assert_eq!(v["verified_simple"], true);
    // the refined point returns to the origin
    for coord in v["refined_point"].as_array().unwrap() {
        assert!(coord[0].as_f64().unwrap().abs() < 1e-9);
        assert!(coord[1].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn symbolic_point_emits_generators() {
    let path = write_temp("pair_sym.sys", PAIR);
    let out = deflate(&[
        "--method",
        "mu",
        "--input",
        path.to_str().unwrap(),
        "--symbolic-point",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("extended system (4 polynomials):"));
    // the first normal-form row is the input polynomial itself
    assert!(text.contains("x2^2 + x1"));
    assert!(text.contains("mu1"));
}

#[test]
fn parse_error_gives_exit_code_1() {
    let path = write_temp("bad.sys", "vars x\npoly x + y\n");
    let out = deflate(&["--method", "dual-only", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown variable y"));
    assert!(err.contains("line 2"));

    let empty = write_temp("empty.sys", "vars x\n");
    let out = deflate(&["--method", "dual-only", "--input", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numeric_failure_gives_exit_code_2() {
    // a non-isolated root: the dual dimensions keep growing
    let path = write_temp("nonisolated.sys", "vars x y\npoly x^2\npoint 0 0\n");
    let out = deflate(&["--method", "dual-only", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_method_gives_usage() {
    let out = deflate(&["--input", "whatever"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn family_requires_valid_n() {
    let out = deflate(&["--method", "dual-only", "--family-n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn print_parse_round_trip() {
    // parse, print through the report, re-parse: identical polynomials
    let path = write_temp("roundtrip.sys", PAIR);
    let out = deflate(&[
        "--method",
        "determinantal",
        "--input",
        path.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let printed = v["deflated_system"].as_array().unwrap();
    let mut src = String::from("vars x1 x2\n");
    for p in printed {
        src.push_str(&format!("poly {}\n", p.as_str().unwrap()));
    }
    let reparse = write_temp("roundtrip2.sys", &src);
    let out2 = deflate(&[
        "--method",
        "dual-only",
        "--input",
        reparse.to_str().unwrap(),
        "--output",
        "json",
    ]);
    // the deflated system has a simple root at the origin; dual-only needs
    // the point line, so splice it in
    let mut src2 = src.clone();
    src2.push_str("point 0 0\n");
    let reparse2 = write_temp("roundtrip3.sys", &src2);
    let out3 = deflate(&[
        "--method",
        "dual-only",
        "--input",
        reparse2.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert!(out3.status.success(), "stderr: {}", String::from_utf8_lossy(&out3.stderr));
    let v3: serde_json::Value = serde_json::from_slice(&out3.stdout).unwrap();
    assert_eq!(v3["multiplicity"], 1);
    let _ = out2;
}

#[test]
fn complex_point_runs_complex_domain() {
    let src = "vars x1 x2 x3 x4\n\
        poly x2^2*x3 + 2*x1*x2*x4 - 2*x1 - x3\n\
        poly x4^2*x1 + 2*x2*x3*x4 - 2*x3 - x1\n\
        poly x1^3*x3 - 4*x1*x2^2*x3 - 4*x1^2*x2*x4 - 2*x2^3*x4 - 4*x1^2 + 10*x2^2 - 4*x1*x3 + 10*x2*x4 - 2\n\
        poly x1*x3^3 - 4*x2*x3^2*x4 - 4*x1*x3*x4^2 - 2*x2*x4^3 - 4*x1*x3 + 10*x2*x4 - 4*x3^2 + 10*x4^2 - 2\n\
        point -1.1547005383792515i -0.5773502691896258i 1.1547005383792515i 0.5773502691896258i\n";
    let path = write_temp("caprasse.sys", src);
    let out = deflate(&[
        "--method",
        "dual-only",
        "--input",
        path.to_str().unwrap(),
        "--output",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["domain"], "complex");
    assert_eq!(v["multiplicity"], 4);
    assert_eq!(v["nil_index"], 2);
}
