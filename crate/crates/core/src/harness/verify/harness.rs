//! Properties of the command layer itself.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Cell, CellOutcome, Grid, PropertySpec, Tracker};
use crate::error::{Error, Result};
use crate::group::BackendFamily;
use crate::harness::config::{Algo, RunConfig, Suite};
use crate::harness::report::{CoverageRecord, PropertyResult, VerifyReport, SCHEMA_VERSION};
use crate::harness::{cmd_bench, cmd_normalize, cmd_sample, schema, strip_timings, HarnessError};

fn to_value<T: Serialize>(r: &T) -> Result<Value> {
    serde_json::to_value(r).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn lift<T>(r: std::result::Result<T, HarnessError>) -> Result<T> {
    r.map_err(|e| match e {
        HarnessError::Numeric(e) => e,
        other => Error::InvalidInput(other.to_string()),
    })
}

/// Small normalize configs covering every family and algorithm.
fn normalize_configs(rng: &mut ChaCha20Rng) -> Vec<RunConfig> {
    let families = [
        BackendFamily::SpdAim,
        BackendFamily::SpdLem,
        BackendFamily::SpdLcm,
        BackendFamily::So,
        BackendFamily::Euclidean,
    ];
    let mut out = Vec::new();
    for family in families {
        for algo in [Algo::Liebn, Algo::Mliebn, Algo::Dsmliebn] {
            out.push(RunConfig {
                family: vec![family],
                dim: vec![3],
                algo,
                batch_size: 8,
                steps: 3,
                domains: 2,
                big_k: 3,
                seed: rng.random(),
                ..RunConfig::default()
            });
        }
    }
    out
}

fn sample_config(rng: &mut ChaCha20Rng) -> RunConfig {
    RunConfig {
        family: vec![BackendFamily::SpdLcm],
        dim: vec![2],
        samples: 500,
        scaling: Some(2.0),
        seed: rng.random(),
        ..RunConfig::default()
    }
}

fn bench_config(rng: &mut ChaCha20Rng) -> RunConfig {
    RunConfig {
        family: vec![BackendFamily::SpdLem, BackendFamily::Euclidean],
        dim: vec![2],
        batch_size: 4,
        steps: 1,
        seed: rng.random(),
        ..RunConfig::default()
    }
}

fn stripped(mut v: Value) -> Value {
    strip_timings(&mut v);
    v
}

fn determinism(rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    let mut check = |name: &str, cfg: &RunConfig, run: &dyn Fn(&RunConfig) -> Result<Value>| {
        let result = (|| {
            let a = stripped(run(cfg)?);
            let b = stripped(run(cfg)?);
            Ok(if a == b { 0.0 } else { 1.0 })
        })();
        t.record(result, || json!({"command": name, "config": cfg}));
    };
    for cfg in normalize_configs(rng) {
        check("normalize", &cfg, &|c| to_value(&lift(cmd_normalize(c))?));
    }
    check("sample", &sample_config(rng), &|c| to_value(&lift(cmd_sample(c))?));
    check("bench", &bench_config(rng), &|c| to_value(&lift(cmd_bench(c))?));
    t.finish()
}

/// A verify report with one passing and one failing property.
fn synthetic_verify_report() -> VerifyReport {
    let property = |id: &'static str, pass: bool| PropertyResult {
        id,
        module: "so_geometry",
        suite: Suite::Rotation,
        description: "synthetic",
        tolerance: 1e-9,
        cells: 1,
        trials: 3,
        rejected: 0,
        max_violation: if pass { Some(0.0) } else { None },
        pass,
        failing_input: (!pass).then(|| json!({"dim": 3, "error": "CutLocusError: synthetic"})),
        elapsed_ms: 0.5,
    };
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        suite: Suite::All,
        seed: 0,
        tolerance_scale: 1.0,
        properties: vec![property("X1", true), property("X2", false)],
        coverage: CoverageRecord {
            invariants: 2,
            covered: 1,
            missing: vec!["so.synthetic".into()],
        },
        passed: false,
        elapsed_ms: 1.0,
    }
}

fn schema_validity(rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    let mut check = |name: &str, report: Result<Value>| {
        let result = report.map(|v| match schema::validate(&v) {
            Ok(()) => (0.0, Value::Null),
            Err(errors) => (1.0, json!(errors)),
        });
        match result {
            Ok((v, errors)) => t.record(Ok(v), || json!({"command": name, "errors": errors})),
            Err(e) => t.record(Err(e), || json!({"command": name})),
        }
    };
    for cfg in normalize_configs(rng) {
        check("normalize", lift(cmd_normalize(&cfg)).and_then(|r| to_value(&r)));
    }
    check("sample", lift(cmd_sample(&sample_config(rng))).and_then(|r| to_value(&r)));
    check("bench", lift(cmd_bench(&bench_config(rng))).and_then(|r| to_value(&r)));
    check("verify", to_value(&synthetic_verify_report()));
    t.finish()
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "C1",
            module: "cli_harness",
            suite: Suite::All,
            description: "identical configs give identical reports once timing fields are removed",
            tolerance: 0.0,
            covers: &["cli.determinism"],
            cells: |_: &Grid| vec![Cell::new(None, determinism)],
        },
        PropertySpec {
            id: "C2",
            module: "cli_harness",
            suite: Suite::All,
            description: "every report kind validates against the shipped JSON schema",
            tolerance: 0.0,
            covers: &["cli.schema-stability"],
            cells: |_: &Grid| vec![Cell::new(None, schema_validity)],
        },
    ]
}
