use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn fatou(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatou"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn as_point(v: &Value) -> Option<(f64, f64)> {
    let a = v.as_array()?;
    Some((a[0].as_f64()?, a[1].as_f64()?))
}

#[test]
fn portrait_reports_postcritical_set_and_flags() {
    let out = fatou(&["portrait", "--map", "paper-g"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "portrait");
    assert_eq!(v["critically_finite"], true);
    assert_eq!(v["hyperbolic"], true);
    assert_eq!(v["all_postcritical_periodic"], true);
    let post = v["postcritical_set"].as_array().unwrap();
    assert_eq!(post.len(), 3);
    assert!(post.iter().any(|p| p == "inf"));
    for x in [0.0, -2.0] {
        assert!(post.iter().filter_map(as_point).any(|(re, im)| (re - x).abs() < 1e-12 && im.abs() < 1e-12));
    }
}

#[test]
fn ray_one_third_lands() {
    let out = fatou(&["ray", "--map", "paper-g", "--angle", "1/3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["angle"], "1/3");
    assert_eq!(v["landed"], true);
    let (re, im) = as_point(&v["landing"]).unwrap();
    let p = (-1.0 - 17f64.sqrt()) / 4.0;
    assert!((re - p).abs() < 1e-6 && im.abs() < 1e-6, "{re} {im}");
}

#[test]
fn decimal_angle_is_a_usage_error() {
    let out = fatou(&["ray", "--map", "paper-g", "--angle", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_map_is_a_usage_error() {
    assert_eq!(fatou(&["portrait", "--map", "no-such-map"]).status.code(), Some(2));
}

#[test]
fn period_two_count() {
    let out = fatou(&["periodic", "--map", "paper-g", "--period", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["count"], 10);
    assert_eq!(v["points"].as_array().unwrap().len(), 10);
}

#[test]
fn lift_around_minus_two() {
    let out = fatou(&["lift", "--map", "paper-g", "--circle", "-2,0,0.1"]);
    assert!(out.status.success());
    let v = json(&out);
    let lifts = v["lifts"].as_array().unwrap();
    assert_eq!(lifts.len(), 1);
    assert_eq!(lifts[0]["degree"], 3);
}

#[test]
fn sign_sequence_through_cli() {
    let out = fatou(&["lift", "--map", "paper-g", "--circle", "-2,0,0.1", "--omega", "0,0", "--steps", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["kind"], "sign-sequence");
    assert_eq!(v["steps"][1]["sign"], -1);
}

#[test]
fn catalog_pinch_and_names() {
    let v = json(&fatou(&["catalog", "--pinch"]));
    let (re, im) = as_point(&v["a"]).unwrap();
    assert!((re - 1.5).abs() < 1e-12 && im.abs() < 1e-12);
    let names = json(&fatou(&["catalog"]));
    assert!(names["names"].as_array().unwrap().iter().any(|n| n == "paper-g"));
    let map = json(&fatou(&["catalog", "--name", "pseudo-basilica:3"]));
    assert_eq!(map["kind"], "map");
    assert_eq!(map["num"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_only_rays() {
    let out = fatou(&["verify", "--only", "rays"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(!lines.is_empty());
    assert!(lines.iter().all(|l| l.starts_with("PASS [rays]")), "{text}");
}

#[test]
fn verify_fails_on_tampered_map() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.json");
    // (z^3 - 3z + 2) / (1.5z + 1): the sign of the constant is flipped.
    fs::write(&path, r#"{"num": [[2, 0], [-3, 0], [0, 0], [1, 0]], "den": [[1, 0], [1.5, 0]]}"#).unwrap();
    let out = fatou(&["verify", "--only", "catalog", "--f3", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL [catalog] f3-identity")), "{text}");
}

#[test]
fn render_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("g{threads}.ppm"));
        let out = Command::new(env!("CARGO_BIN_EXE_fatou"))
            .env("FATOU_THREADS", threads)
            .args(["render", "--map", "paper-g", "--width", "64", "--height", "48", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert_eq!(json(&out)["kind"], "render");
        images.push(fs::read(&path).unwrap());
    }
    assert!(images[0].starts_with(b"P6\n64 48\n255\n"));
    assert_eq!(images[0].len(), b"P6\n64 48\n255\n".len() + 64 * 48 * 3);
    assert_eq!(images[0], images[1]);
}

#[test]
fn in_process_entry_point() {
    let mut buf = Vec::new();
    let code = fatou_core::cli::run(["fatou", "periodic", "--map", "paper-g", "--period", "1"], &mut buf);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&buf).unwrap();
    assert_eq!(v["count"], 4);
}
