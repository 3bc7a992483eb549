//! Monte Carlo checks of the Riemannian Gaussian on the pullback-Euclidean
//! SPD backends.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use super::{Cell, CellOutcome, Grid, PropertySpec, Tracker};
use crate::error::Result;
use crate::gaussian::GaussianParams;
use crate::group::LieGroup;
use crate::harness::config::Suite;
use crate::harness::HarnessBackend;
use crate::matkernels::SpdMatrix;
use crate::spd::{SpdFamily, SpdMetric};

const N: usize = 20_000;
const SIGMA: f64 = 0.5;

type Run = fn(&SpdMetric, &mut ChaCha20Rng) -> CellOutcome;

fn cells(grid: &Grid, dims: &[usize], families: &[SpdFamily], run: Run) -> Vec<Cell> {
    let mut out = Vec::new();
    for &family in families {
        for n in grid.dims(dims, 1, 6) {
            let m = SpdMetric::new(family, n, 1.0, 1.0, 0.0).expect("valid metric");
            out.push(Cell::new(Some(family.backend_family()), move |rng| run(&m, rng)));
        }
    }
    out
}

fn standard_cells(grid: &Grid, run: Run) -> Vec<Cell> {
    cells(grid, &[2, 3], &[SpdFamily::Lem, SpdFamily::Lcm], run)
}

fn random_mean(m: &SpdMetric, rng: &mut ChaCha20Rng) -> Result<SpdMatrix> {
    m.exp_identity(&m.random_tangent(rng, 0.5))
}

fn mean_error(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    let seed: u64 = rng.random();
    let result = (|| {
        let params = GaussianParams::new(*m, random_mean(m, rng)?, SIGMA)?;
        let report = params.report(&params.sample(N, seed)?, seed)?;
        Ok((report.mean_distance / report.standard_error, json!(report)))
    })();
    match result {
        Ok((v, report)) => t.record(Ok(v), || json!({"backend": m.descriptor(), "report": report})),
        Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "seed": seed})),
    }
    t.finish()
}

fn scaling(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for s in [0.5, 2.0] {
        let seed: u64 = rng.random();
        let result = GaussianParams::new(*m, m.identity(), SIGMA).and_then(|p| p.verify_scaling_law(s, N, seed));
        match result {
            Ok(r) => {
                let v = (r.ratio_to_original / (s * s) - 1.0).abs().max((r.ratio_to_analytic - 1.0).abs());
                t.record(Ok(v), || json!({"backend": m.descriptor(), "report": r}));
            }
            Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "s": s, "seed": seed})),
        }
    }
    t.finish()
}

/// `threshold / min p`: at most 1 when every coordinate passes the Bonferroni-corrected test.
fn ks(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for s in [0.5, 2.0] {
        let seed: u64 = rng.random();
        let result = GaussianParams::new(*m, m.identity(), SIGMA).and_then(|p| p.verify_scaling_law(s, N, seed));
        match result {
            Ok(r) => {
                let p_min = r.ks_p_values.iter().copied().fold(1.0, f64::min);
                t.record(Ok(r.ks_threshold / p_min), || json!({"backend": m.descriptor(), "report": r}));
            }
            Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "s": s, "seed": seed})),
        }
    }
    t.finish()
}

/// `max(shift / 3 SE, |variance ratio − 1| / 0.05)`: at most 1 when the check passes.
fn homogeneity(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    let seed: u64 = rng.random();
    let result = (|| {
        let params = GaussianParams::new(*m, random_mean(m, rng)?, SIGMA)?;
        let b = random_mean(m, rng)?;
        let r = params.verify_homogeneity(&b, N, seed)?;
        let v = (r.mean_shift / (3.0 * r.standard_error)).max((r.variance_ratio - 1.0).abs() / 0.05);
        Ok((v, json!({"report": r, "B": b.to_row_major()})))
    })();
    match result {
        Ok((v, input)) => t.record(Ok(v), || json!({"backend": m.descriptor(), "input": input})),
        Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "seed": seed})),
    }
    t.finish()
}

/// 1 unless the sample mean strictly beats every perturbation.
fn mle(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..5 {
        let seed: u64 = rng.random();
        let result = (|| {
            let params = GaussianParams::new(*m, random_mean(m, rng)?, SIGMA)?;
            params.mle_probe(1000, seed, 50, 0.05)
        })();
        match result {
            Ok(r) => t.record(Ok(if r.passed { 0.0 } else { 1.0 }), || json!({"backend": m.descriptor(), "report": r})),
            Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "trial": trial, "seed": seed})),
        }
    }
    t.finish()
}

fn determinism(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..5 {
        let seed: u64 = rng.random();
        let result = (|| {
            let mean = random_mean(m, rng)?;
            let params = GaussianParams::new(*m, mean.clone(), SIGMA)?;
            let a = params.sample(500, seed)?;
            let b = params.sample(500, seed)?;
            let c = params.sample(500, seed.wrapping_add(1))?;
            let mut v = if a == b && a != c { 0.0 } else { 1.0 };
            let tight = GaussianParams::new(*m, mean.clone(), 1e-8)?;
            for p in tight.sample(500, seed)? {
                if m.distance(&p, &mean)? > 1e-6 {
                    v = 1.0;
                }
            }
            Ok(v)
        })();
        t.record(result, || json!({"backend": m.descriptor(), "trial": trial, "seed": seed}));
    }
    t.finish()
}

/// `1 − ρ` for the rank correlation of shell log-frequencies with the log density.
fn shells(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    let seed: u64 = rng.random();
    let result = GaussianParams::new(*m, m.identity(), 1.0).and_then(|p| p.density_shell_check(50_000, seed, 20));
    match result {
        Ok(r) => t.record(Ok(1.0 - r.spearman), || json!({"backend": m.descriptor(), "report": r})),
        Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "seed": seed})),
    }
    t.finish()
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "G1",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "distance of the sample Frechet mean to M in Monte Carlo standard errors (n = 20000)",
            tolerance: 3.0,
            covers: &["gaussian.mean-and-scaling"],
            cells: |g| standard_cells(g, mean_error),
        },
        PropertySpec {
            id: "G2",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "dilation variance ratio: max relative deviation from s^2, s in {0.5, 2}",
            tolerance: 0.05,
            covers: &["gaussian.mean-and-scaling"],
            cells: |g| standard_cells(g, scaling),
        },
        PropertySpec {
            id: "G3",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "per-coordinate two-sample KS of dilated vs fresh samples at 0.01, Bonferroni threshold over min p, s in {0.5, 2}",
            tolerance: 1.0,
            covers: &["gaussian.mean-and-scaling"],
            cells: |g| standard_cells(g, ks),
        },
        PropertySpec {
            id: "G4",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "translated samples: mean shift over 3 SE and variance ratio deviation over 0.05",
            tolerance: 1.0,
            covers: &["gaussian.homogeneity"],
            cells: |g| standard_cells(g, homogeneity),
        },
        PropertySpec {
            id: "G5",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "sample Frechet mean beats 50 perturbations at radius 0.05",
            tolerance: 0.0,
            covers: &["gaussian.mle"],
            cells: |g| standard_cells(g, mle),
        },
        PropertySpec {
            id: "G6",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "equal seeds give equal samples; sigma = 1e-8 concentrates within 1e-6 of M",
            tolerance: 0.0,
            covers: &["gaussian.seeded-determinism"],
            cells: |g| standard_cells(g, determinism),
        },
        PropertySpec {
            id: "G7",
            module: "manifold_gaussian",
            suite: Suite::Gaussian,
            description: "1 - Spearman correlation of shell log-frequency with log density (n = 50000, LEM dim 2)",
            tolerance: 0.05,
            covers: &["gaussian.density-consistency"],
            cells: |g| cells(g, &[2], &[SpdFamily::Lem], shells),
        },
    ]
}
