//! Property registry and runner behind `liebn verify`.
//!
//! Each property expands into cells (usually one per family, parameter
//! setting and dimension). Cells run in parallel, each with its own
//! seeded generator, and are merged back in registry order.

mod gaussian;
mod harness;
mod kernels;
mod liebn;
mod rotation;
mod spd;

use std::time::Instant;

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{RunConfig, Suite};
use super::report::{CoverageRecord, PropertyResult, VerifyReport, SCHEMA_VERSION};
use super::{mix_seed, HarnessError, HarnessResult};
use crate::error::Result;
use crate::group::BackendFamily;
use crate::random::rng_from_seed;

/// Outcome of one cell: trial count and the worst violation with its input.
#[derive(Clone, Debug, Default)]
pub(crate) struct CellOutcome {
    pub trials: usize,
    pub rejected: usize,
    pub max_violation: f64,
    pub worst: Option<Value>,
}

/// Accumulates trials of a cell, keeping the input of the largest violation.
/// Errors count as an infinite violation.
#[derive(Default)]
pub(crate) struct Tracker {
    out: CellOutcome,
}

impl Tracker {
    pub fn new() -> Self {
        Tracker::default()
    }

    pub fn record(&mut self, result: Result<f64>, input: impl FnOnce() -> Value) {
        self.out.trials += 1;
        let (violation, error) = match result {
            Ok(v) if v.is_nan() => (f64::INFINITY, Some("violation is NaN".to_string())),
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(format!("{}: {e}", e.name()))),
        };
        if self.out.worst.is_none() || violation > self.out.max_violation {
            let mut inp = input();
            if let (Some(msg), Value::Object(map)) = (error, &mut inp) {
                map.insert("error".into(), Value::String(msg));
            }
            self.out.max_violation = violation;
            self.out.worst = Some(inp);
        }
    }

    pub fn reject(&mut self) {
        self.out.rejected += 1;
    }

    pub fn finish(self) -> CellOutcome {
        self.out
    }
}

type CellFn = Box<dyn Fn(&mut ChaCha20Rng) -> CellOutcome + Send + Sync>;

pub(crate) struct Cell {
    /// Backend family exercised, for `--family` filtering.
    pub family: Option<BackendFamily>,
    pub run: CellFn,
}

impl Cell {
    pub fn new(family: Option<BackendFamily>, run: impl Fn(&mut ChaCha20Rng) -> CellOutcome + Send + Sync + 'static) -> Self {
        Cell { family, run: Box::new(run) }
    }
}

/// Dimension selection shared by all properties.
pub(crate) struct Grid {
    explicit: Option<Vec<usize>>,
}

impl Grid {
    /// The property's own dimensions, or the requested ones restricted to `[min, max]`.
    pub fn dims(&self, default: &[usize], min: usize, max: usize) -> Vec<usize> {
        match &self.explicit {
            Some(d) => d.iter().copied().filter(|&n| (min..=max).contains(&n)).collect(),
            None => default.to_vec(),
        }
    }
}

pub(crate) struct PropertySpec {
    pub id: &'static str,
    pub module: &'static str,
    pub suite: Suite,
    pub description: &'static str,
    pub tolerance: f64,
    /// Keys of [`INVARIANTS`] this property exercises.
    pub covers: &'static [&'static str],
    pub cells: fn(&Grid) -> Vec<Cell>,
}

/// Every module invariant the suites must exercise.
pub const INVARIANTS: &[(&str, &str)] = &[
    ("matkernels.eigpair", "eigenvectors orthonormal and reconstruct the input"),
    ("matkernels.round-trips", "mexp/mlog, clog_inv/clog and pow round trips"),
    ("matkernels.pow-identity-conjugation", "pow(1) is the identity and pow commutes with conjugation"),
    ("matkernels.vjp-finite-differences", "Daleckii-Krein VJP agrees with central differences"),
    ("matkernels.cholesky", "Cholesky reconstructs the input and gives the determinant"),
    ("spd.group-axioms", "associativity, neutral element and inverses"),
    ("spd.left-invariance", "left translations preserve distance"),
    ("spd.bi-invariance", "right translations preserve LEM and LCM distance"),
    ("spd.deformation-law", "LEM distance independent of theta; LCM tends to the LEM-type limit"),
    ("spd.first-order-condition", "tangent residual vanishes at the Frechet mean"),
    ("spd.mean-homogeneity", "mean of translated points is the translated mean"),
    ("spd.controllable-dispersion", "dilation scales the dispersion about E by s squared"),
    ("spd.pullback-distance", "LCM distance agrees with the chart formula and geodesic length"),
    ("so.exp-log-inverse", "exp and log are inverse within the injectivity radius"),
    ("so.left-invariance", "left translations preserve rotation distance"),
    ("so.closed-form-vs-series", "SO(3) closed forms match generic series"),
    ("so.group-hooks", "matrix product, transpose and identity form a group"),
    ("liebn.mean-control", "normalized batch has Frechet mean B"),
    ("liebn.variance-control", "pre-bias dispersion equals s^2 v^2/(v^2+eps)"),
    ("liebn.euclidean-reduction", "Euclidean LieBN is textbook batch normalization"),
    ("liebn.pullback-equivalence", "direct and codomain computations agree"),
    ("liebn.eval-purity", "eval forward leaves state untouched and repeats bitwise"),
    ("liebn.aim-scaling-power", "AIM scaling is the matrix power"),
    ("liebn.momentum", "train-momentum schedule and MLieBN reduction"),
    ("liebn.domain-partition", "DSMLieBN equals per-domain MLieBN"),
    ("liebn.state-record", "state record round-trips bit-exactly"),
    ("gaussian.mean-and-scaling", "sample mean, variance scaling and KS agreement"),
    ("gaussian.homogeneity", "translated samples are centred at the translated mean"),
    ("gaussian.mle", "sample mean beats random perturbations"),
    ("gaussian.seeded-determinism", "identical seeds give identical samples"),
    ("gaussian.density-consistency", "shell frequencies track the density"),
    ("cli.determinism", "identical configs give identical reports up to timings"),
    ("cli.schema-stability", "reports validate against the shipped schema"),
];

pub(crate) fn registry() -> Vec<PropertySpec> {
    let mut r = Vec::new();
    r.extend(kernels::properties());
    r.extend(spd::properties());
    r.extend(rotation::properties());
    r.extend(liebn::properties());
    r.extend(gaussian::properties());
    r.extend(harness::properties());
    r
}

/// Invariant keys not exercised by any registered property.
pub fn missing_invariants() -> Vec<String> {
    let reg = registry();
    INVARIANTS
        .iter()
        .filter(|(key, _)| !reg.iter().any(|p| p.covers.contains(key)))
        .map(|(key, _)| key.to_string())
        .collect()
}

/// Ids of all registered properties, in order.
pub fn property_ids() -> Vec<&'static str> {
    registry().iter().map(|p| p.id).collect()
}

fn id_salt(id: &str) -> u64 {
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn thread_count() -> HarnessResult<Option<usize>> {
    match std::env::var("LIEBN_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| HarnessError::Config(format!("LIEBN_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

/// Runs the selected suites.
pub fn cmd_verify(cfg: &RunConfig) -> HarnessResult<VerifyReport> {
    let start = Instant::now();
    let grid = Grid {
        explicit: cfg.verify_dims.then(|| cfg.dim.clone()),
    };
    let families = cfg.verify_families.then(|| cfg.family.clone());
    let specs: Vec<PropertySpec> = registry()
        .into_iter()
        .filter(|p| cfg.suite == Suite::All || p.suite == cfg.suite)
        .collect();

    let mut jobs = Vec::new();
    for (pi, spec) in specs.iter().enumerate() {
        for (ci, cell) in (spec.cells)(&grid).into_iter().enumerate() {
            let wanted = match (&families, cell.family) {
                (Some(list), Some(f)) => list.contains(&f),
                _ => true,
            };
            if wanted {
                let seed = mix_seed(mix_seed(cfg.seed, id_salt(spec.id)), ci as u64);
                jobs.push((pi, seed, cell));
            }
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| HarnessError::Config(e.to_string()))?;
    let outcomes: Vec<(usize, CellOutcome, f64)> = pool.install(|| {
        jobs.into_par_iter()
            .map(|(pi, seed, cell)| {
                let t = Instant::now();
                let mut rng = rng_from_seed(seed);
                let out = (cell.run)(&mut rng);
                (pi, out, t.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });

    let mut properties = Vec::with_capacity(specs.len());
    for (pi, spec) in specs.iter().enumerate() {
        let tolerance = spec.tolerance * cfg.tolerance_scale;
        let mut merged = CellOutcome::default();
        let mut cells = 0;
        let mut cpu_ms = 0.0;
        for (_, out, ms) in outcomes.iter().filter(|(p, _, _)| *p == pi) {
            cells += 1;
            cpu_ms += ms;
            merged.trials += out.trials;
            merged.rejected += out.rejected;
            if out.worst.is_some() && (merged.worst.is_none() || out.max_violation > merged.max_violation) {
                merged.max_violation = out.max_violation;
                merged.worst = out.worst.clone();
            }
        }
        let pass = merged.max_violation <= tolerance;
        properties.push(PropertyResult {
            id: spec.id,
            module: spec.module,
            suite: spec.suite,
            description: spec.description,
            tolerance,
            cells,
            trials: merged.trials,
            rejected: merged.rejected,
            max_violation: merged.max_violation.is_finite().then_some(merged.max_violation),
            pass,
            failing_input: if pass { None } else { merged.worst },
            elapsed_ms: cpu_ms,
        });
    }

    let missing = missing_invariants();
    let coverage = CoverageRecord {
        invariants: INVARIANTS.len(),
        covered: INVARIANTS.len() - missing.len(),
        missing,
    };
    let passed = coverage.missing.is_empty() && properties.iter().all(|p| p.pass);
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        suite: cfg.suite,
        seed: cfg.seed,
        tolerance_scale: cfg.tolerance_scale,
        properties,
        coverage,
        passed,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Relative Frobenius error `‖a − b‖ / ‖b‖`.
pub(crate) fn rel(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Row-major entries as a JSON array.
pub(crate) fn entries(m: &nalgebra::DMatrix<f64>) -> Value {
    json!(m.transpose().iter().copied().collect::<Vec<f64>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_covers_every_invariant() {
        assert!(missing_invariants().is_empty(), "{:?}", missing_invariants());
    }

    #[test]
    fn property_ids_are_unique() {
        let ids = property_ids();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), ids.len());
    }

    #[test]
    fn tracker_keeps_worst_input() {
        let mut t = Tracker::new();
        t.record(Ok(1e-12), || json!({"k": 0}));
        t.record(Ok(1e-9), || json!({"k": 1}));
        t.record(Ok(1e-10), || json!({"k": 2}));
        let out = t.finish();
        assert_eq!((out.trials, out.max_violation), (3, 1e-9));
        assert_eq!(out.worst.unwrap()["k"], 1);
        let mut t = Tracker::new();
        t.record(Err(crate::Error::DomainError("x".into())), || json!({"k": 5}));
        let out = t.finish();
        assert!(out.max_violation.is_infinite());
        assert!(out.worst.unwrap()["error"].as_str().unwrap().starts_with("DomainError"));
    }
}
