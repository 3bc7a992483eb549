//! One pass/fail line per acceptance criterion (custom harness, so the
//! lines show even when everything passes). Criteria 1-11 read the
//! property report of `liebn verify --suite all`; 12 times that run and
//! checks that equal seeds give equal reports once timings are dropped.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use serde_json::Value;

struct Check {
    id: &'static str,
    /// Tolerance the criterion states; the report must not use a looser one.
    tolerance: f64,
}

struct Criterion {
    number: usize,
    name: &'static str,
    checks: &'static [Check],
    /// Runtime budget over the summed property timings, in milliseconds.
    budget_ms: Option<f64>,
}

const fn c(id: &'static str, tolerance: f64) -> Check {
    Check { id, tolerance }
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        name: "kernel round trips within 1e-10",
        checks: &[c("K2", 1e-10)],
        budget_ms: Some(10_000.0),
    },
    Criterion {
        number: 2,
        name: "Daleckii-Krein VJP vs central differences < 1e-5",
        checks: &[c("K4", 1e-5)],
        budget_ms: Some(30_000.0),
    },
    Criterion {
        number: 3,
        name: "group axioms and left/bi-invariance < 1e-8",
        checks: &[c("S1", 1e-8), c("S2", 1e-8), c("S3", 1e-8), c("S4", 1e-8)],
        budget_ms: None,
    },
    Criterion {
        number: 4,
        name: "theta-LEM distance 1e-9, theta-LCM limit 1e-3",
        checks: &[c("S5", 1e-9), c("S6", 1e-3)],
        budget_ms: None,
    },
    Criterion {
        number: 5,
        name: "post-LieBN mean is B (1e-7, AIM 1e-6)",
        checks: &[c("L1", 1e-7), c("L2", 1e-6)],
        budget_ms: None,
    },
    Criterion {
        number: 6,
        name: "pre-bias dispersion s^2 v^2 / (v^2 + eps) within 1e-7",
        checks: &[c("L3", 1e-7)],
        budget_ms: None,
    },
    Criterion {
        number: 7,
        name: "direct vs codomain LieBN (1e-9, AIM 1e-7)",
        checks: &[c("L5", 1e-9), c("L6", 1e-7)],
        budget_ms: None,
    },
    Criterion {
        number: 8,
        name: "Euclidean LieBN equals textbook BN to 1e-12",
        checks: &[c("L4", 1e-12)],
        budget_ms: None,
    },
    Criterion {
        number: 9,
        name: "train momentum, MLieBN bitwise, DSMLieBN 1e-12",
        checks: &[c("L9", 0.0), c("L10", 1e-12)],
        budget_ms: None,
    },
    Criterion {
        number: 10,
        name: "rotation suite",
        checks: &[c("R1", 1e-9), c("R2", 1e-9), c("R3", 1e-9), c("R4", 0.0), c("R5", 1e-9)],
        budget_ms: None,
    },
    Criterion {
        number: 11,
        name: "Gaussian suite at n = 20000",
        checks: &[c("G1", 3.0), c("G2", 0.05), c("G3", 1.0), c("G4", 1.0)],
        budget_ms: Some(120_000.0),
    },
];

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liebn"))
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("liebn-acceptance-{}-{name}", std::process::id()))
}

fn run_to_file(args: &[&str], name: &str) -> (i32, Value, f64) {
    let out = scratch(name);
    let start = Instant::now();
    let status = bin().args(args).arg("--out").arg(&out).status().expect("spawn liebn");
    let secs = start.elapsed().as_secs_f64();
    let text = std::fs::read_to_string(&out).expect("report written");
    let _ = std::fs::remove_file(&out);
    (status.code().unwrap_or(-1), serde_json::from_str(&text).expect("report is JSON"), secs)
}

fn without_timings(mut v: Value) -> String {
    liebn::harness::strip_timings(&mut v);
    serde_json::to_string(&v).unwrap()
}

fn evaluate(criterion: &Criterion, properties: &[Value]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    let mut elapsed = 0.0;
    for check in criterion.checks {
        let Some(p) = properties.iter().find(|p| p["id"] == check.id) else {
            ok = false;
            parts.push(format!("{} missing", check.id));
            continue;
        };
        let pass = p["pass"].as_bool() == Some(true);
        let tolerance = p["tolerance"].as_f64().unwrap_or(f64::INFINITY);
        let stated = tolerance <= check.tolerance;
        elapsed += p["elapsed_ms"].as_f64().unwrap_or(0.0);
        ok &= pass && stated;
        parts.push(format!(
            "{} {} (max {} / tol {:e}{})",
            check.id,
            if pass { "ok" } else { "FAIL" },
            p["max_violation"].as_f64().map_or("inf".into(), |v| format!("{v:.2e}")),
            tolerance,
            if stated { "" } else { ", looser than stated" },
        ));
    }
    if let Some(budget) = criterion.budget_ms {
        let within = elapsed < budget;
        ok &= within;
        parts.push(format!("{:.1} s of {:.0} s", elapsed / 1e3, budget / 1e3));
    }
    (ok, parts.join("; "))
}

fn main() {
    let (code, report, secs) = run_to_file(&["verify", "--suite", "all", "--seed", "0"], "all.json");
    let properties = report["properties"].as_array().cloned().unwrap_or_default();

    let mut failures = Vec::new();
    for criterion in CRITERIA {
        let (ok, detail) = evaluate(criterion, &properties);
        println!(
            "criterion {:>2} {}: {} [{}]",
            criterion.number,
            if ok { "PASS" } else { "FAIL" },
            criterion.name,
            detail
        );
        if !ok {
            failures.push(criterion.number);
        }
    }

    let args = ["verify", "--suite", "rotation", "--seed", "7"];
    let (_, first, _) = run_to_file(&args, "det-a.json");
    let (_, second, _) = run_to_file(&args, "det-b.json");
    let norm = ["normalize", "--family", "spd-aim", "--dim", "3", "--steps", "5", "--seed", "7"];
    let (_, n1, _) = run_to_file(&norm, "det-c.json");
    let (_, n2, _) = run_to_file(&norm, "det-d.json");
    let deterministic = without_timings(first) == without_timings(second) && without_timings(n1) == without_timings(n2);
    let ok = code == 0 && secs < 600.0 && deterministic && report["passed"] == true;
    println!(
        "criterion 12 {}: verify all exits 0 under 10 min, equal seeds give equal reports [exit {code}; {secs:.1} s; deterministic {deterministic}]",
        if ok { "PASS" } else { "FAIL" },
    );
    if !ok {
        failures.push(12);
    }

    if !failures.is_empty() {
        eprintln!("failing criteria: {failures:?}");
        std::process::exit(1);
    }
}
