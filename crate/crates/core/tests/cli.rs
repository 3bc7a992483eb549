use std::path::PathBuf;
use std::process::{Command, Output};

use liebn::harness::{schema, strip_timings};
use serde_json::Value;

fn liebn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liebn")).args(args).output().expect("spawn liebn")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("liebn-cli-{}-{name}", std::process::id()))
}

fn report(args: &[&str]) -> Value {
    let out = liebn(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn stripped(mut v: Value) -> Value {
    strip_timings(&mut v);
    v
}

const NORMALIZE: &[&str] = &["normalize", "--family", "spd-lcm", "--dim", "3", "--steps", "4", "--seed", "3"];
const SAMPLE: &[&str] = &["sample", "--family", "spd-lem", "--dim", "2", "--samples", "2000", "--scaling", "2", "--seed", "5"];
const BENCH: &[&str] = &["bench", "--family", "spd-lem,spd-aim", "--dim", "3", "--steps", "3", "--batch-size", "8"];
const VERIFY: &[&str] = &["verify", "--suite", "rotation", "--seed", "1"];

#[test]
fn reports_validate_against_schema() {
    for args in [NORMALIZE, SAMPLE, BENCH, VERIFY] {
        let r = report(args);
        assert_eq!(r["schema_version"], "1");
        if let Err(errors) = schema::validate(&r) {
            panic!("{} report: {errors:?}", args[0]);
        }
    }
}

#[test]
fn equal_seeds_give_equal_reports() {
    for args in [NORMALIZE, SAMPLE, BENCH, VERIFY] {
        assert_eq!(stripped(report(args)), stripped(report(args)), "{}", args[0]);
    }
    let mut other = NORMALIZE.to_vec();
    *other.last_mut().unwrap() = "4";
    assert_ne!(stripped(report(NORMALIZE)), stripped(report(&other)));
}

#[test]
fn normalize_controls_mean_and_variance() {
    for (family, scale) in [("euclidean", "2"), ("spd-lem", "2"), ("spd-aim", "2"), ("spd-lcm", "2"), ("so", "0.5")] {
        let r = report(&["normalize", "--family", family, "--dim", "3", "--steps", "3", "--scale", scale]);
        let steps = r["steps"].as_array().unwrap();
        assert_eq!(steps.len(), 3);
        for s in steps {
            assert!(s["post_mean_distance"].as_f64().unwrap() < 1e-6, "{family}: {s}");
            let (got, want) = (s["post_variance"].as_f64().unwrap(), s["expected_post_variance"].as_f64().unwrap());
            assert!((got - want).abs() < 1e-7 * want, "{family}: {got} vs {want}");
        }
    }
}

#[test]
fn normalize_reports_null_when_output_mean_is_undefined() {
    let r = report(&["normalize", "--family", "so", "--dim", "3", "--steps", "2", "--scale", "2"]);
    for s in r["steps"].as_array().unwrap() {
        assert!(s["post_mean_distance"].is_null() && s["post_variance"].is_null());
        assert!(s["pre_variance"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn csv_output() {
    let out = liebn(&["verify", "--suite", "rotation", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "id"));
    assert_eq!(reader.records().count(), 7);
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("normalize.json");
    let p = path.to_str().unwrap();
    let out = liebn(&["normalize", "--family", "spd-lem", "--dim", "2", "--steps", "2", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written["command"], "normalize");
}

#[test]
fn config_file_overrides_flags() {
    let path = scratch("config.json");
    std::fs::write(&path, r#"{"dim": [4], "steps": 2}"#).unwrap();
    let r = report(&["normalize", "--family", "spd-lem", "--dim", "2", "--steps", "5", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(r["backend"]["dim"], 4);
    assert_eq!(r["steps"].as_array().unwrap().len(), 2);
}

#[test]
fn matrix_file_input() {
    let path = scratch("batch.mat");
    std::fs::write(
        &path,
        "dim 2 count 4\n2 0.3\n0.3 1\n1.2 -0.4\n-0.4 0.9\n0.6 0.1\n0.1 1.8\n3 1\n1 1.5\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let r = report(&["normalize", "--family", "spd-aim", "--dim", "2", "--batch-size", "4", "--steps", "1", "--input", p]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(r["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(liebn(&["--help"]).status.code(), Some(0));

    let failing = liebn(&["verify", "--suite", "rotation", "--tolerance-scale", "0"]);
    assert_eq!(failing.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&failing.stderr);
    assert!(stderr.contains("FAIL R1") && stderr.contains("failing input"), "{stderr}");
    let r: Value = serde_json::from_slice(&failing.stdout).unwrap();
    assert_eq!(r["passed"], false);

    assert_eq!(liebn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(liebn(&["normalize", "--dim", "0"]).status.code(), Some(2));
    assert_eq!(liebn(&["normalize", "--family", "spd-lem", "--theta", "0"]).status.code(), Some(2));
    assert_eq!(liebn(&["normalize", "--config", "/nonexistent/liebn.json"]).status.code(), Some(2));

    let so = liebn(&["sample", "--family", "so", "--dim", "3"]);
    assert_eq!(so.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&so.stderr).contains("UnsupportedBackend"));

    let numeric = liebn(&["normalize", "--family", "spd-aim", "--dim", "8", "--spread", "20", "--steps", "1"]);
    assert_eq!(numeric.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&numeric.stderr).contains("DomainError"));
}
