//! SPD geometry properties over the (family, θ, α, β, dim) grid.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use super::{entries, rel, Cell, CellOutcome, Grid, PropertySpec, Tracker};
use crate::error::Result;
use crate::group::LieGroup;
use crate::harness::config::Suite;
use crate::matkernels::{clog, mpow, ScalarFn, SpdMatrix, Spectral, SymMatrix};
use crate::random::{random_spd, random_sym};
use crate::spd::{SpdFamily, SpdMetric, TangentVector};

const THETAS: [f64; 5] = [-1.5, -0.5, 0.5, 1.0, 1.5];
const DIMS: [usize; 5] = [2, 3, 4, 5, 6];
const ALL: [SpdFamily; 3] = [SpdFamily::Aim, SpdFamily::Lem, SpdFamily::Lcm];
const TRIALS: usize = 200;
const SPREAD: f64 = 1.0;

type Run = fn(&SpdMetric, &mut ChaCha20Rng) -> CellOutcome;

/// Every metric of the grid: both `(α, β)` settings except for LCM, which only takes `(1, 0)`.
fn metrics(grid: &Grid, families: &[SpdFamily], thetas: &[f64]) -> Vec<SpdMetric> {
    let mut out = Vec::new();
    for &family in families {
        for &theta in thetas {
            for n in grid.dims(&DIMS, 1, 12) {
                let mut abs = vec![(1.0, 0.0)];
                if family != SpdFamily::Lcm {
                    abs.push((1.0, 1.0 / (n * n) as f64));
                }
                for (alpha, beta) in abs {
                    out.push(SpdMetric::new(family, n, theta, alpha, beta).expect("valid grid metric"));
                }
            }
        }
    }
    out
}

fn cells(metrics: Vec<SpdMetric>, run: Run) -> Vec<Cell> {
    metrics
        .into_iter()
        .map(|m| Cell::new(Some(m.family().backend_family()), move |rng| run(&m, rng)))
        .collect()
}

fn label(m: &SpdMetric, trial: usize) -> Value {
    json!({"backend": m.descriptor(), "trial": trial})
}

fn with(mut base: Value, key: &str, p: &SpdMatrix) -> Value {
    base[key] = entries(p.as_matrix());
    base
}

/// `|a − b| / max(1, |b|)`.
fn scaled_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn axioms(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let (a, b, c) = (random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD));
        let result = (|| {
            let ab_c = m.group_compose(&m.group_compose(&a, &b)?, &c)?;
            let a_bc = m.group_compose(&a, &m.group_compose(&b, &c)?)?;
            let e = m.identity();
            let left = rel(m.group_compose(&e, &a)?.as_matrix(), a.as_matrix());
            let right = rel(m.group_compose(&a, &e)?.as_matrix(), a.as_matrix());
            Ok(rel(ab_c.as_matrix(), a_bc.as_matrix()).max(left).max(right))
        })();
        t.record(result, || with(with(with(label(m, trial), "A", &a), "B", &b), "C", &c));
    }
    t.finish()
}

fn inverses(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let p = random_spd(rng, n, SPREAD);
        let result = (|| {
            let inv = m.group_inverse(&p)?;
            let e = m.identity();
            let a = (m.group_compose(&p, &inv)?.as_matrix() - e.as_matrix()).norm();
            let b = (m.group_compose(&inv, &p)?.as_matrix() - e.as_matrix()).norm();
            Ok(a.max(b))
        })();
        t.record(result, || with(label(m, trial), "P", &p));
    }
    t.finish()
}

fn translation_gap(m: &SpdMetric, rng: &mut ChaCha20Rng, right: bool) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let (q, p1, p2) = (random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD));
        let result = (|| {
            let d = m.geodesic_distance(&p1, &p2)?;
            let (a, b) = if right {
                (m.group_compose(&p1, &q)?, m.group_compose(&p2, &q)?)
            } else {
                (m.group_compose(&q, &p1)?, m.group_compose(&q, &p2)?)
            };
            Ok(scaled_gap(m.geodesic_distance(&a, &b)?, d))
        })();
        t.record(result, || with(with(with(label(m, trial), "Q", &q), "P1", &p1), "P2", &p2));
    }
    t.finish()
}

fn left_invariance(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    translation_gap(m, rng, false)
}

fn bi_invariance(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    translation_gap(m, rng, true)
}

fn lem_deformation(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let base = SpdMetric::lem(n, m.alpha(), m.beta()).expect("grid metric");
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let (p, q) = (random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD));
        let result = (|| Ok(scaled_gap(m.geodesic_distance(&p, &q)?, base.geodesic_distance(&p, &q)?)))();
        t.record(result, || with(with(label(m, trial), "P", &p), "Q", &q));
    }
    t.finish()
}

/// `½⟨X, Y⟩ − ¼⟨𝔻X, 𝔻Y⟩` with `X, Y` the differentials of `log` at `P`.
fn g_tilde(p: &SpdMatrix, v: &SymMatrix, w: &SymMatrix) -> Result<f64> {
    let spec = Spectral::of_spd(p);
    let x = spec.differential(ScalarFn::Log, v)?;
    let y = spec.differential(ScalarFn::Log, w)?;
    Ok(0.5 * x.frobenius_dot(&y) - 0.25 * x.diagonal_part().frobenius_dot(&y.diagonal_part()))
}

const LCM_LIMIT_THETA: f64 = 1e-4;

fn lcm_limit_cells(grid: &Grid) -> Vec<Cell> {
    grid.dims(&DIMS, 1, 12)
        .into_iter()
        .map(|n| {
            Cell::new(Some(SpdFamily::Lcm.backend_family()), move |rng| {
                let m = SpdMetric::lcm(n, LCM_LIMIT_THETA).expect("valid metric");
                let mut t = Tracker::new();
                for trial in 0..100 {
                    let p = random_spd(rng, n, SPREAD);
                    let (v, w) = (random_sym(rng, n, 1.0), random_sym(rng, n, 1.0));
                    let result = (|| {
                        let got = m.metric_inner_at(&p, &TangentVector::Sym(v.clone()), &TangentVector::Sym(w.clone()))?;
                        let want = g_tilde(&p, &v, &w)?;
                        let scale = (g_tilde(&p, &v, &v)? * g_tilde(&p, &w, &w)?).sqrt();
                        Ok((got - want).abs() / scale)
                    })();
                    t.record(result, || {
                        json!({"dim": n, "theta": LCM_LIMIT_THETA, "trial": trial, "P": entries(p.as_matrix()),
                               "V": entries(v.as_matrix()), "W": entries(w.as_matrix())})
                    });
                }
                t.finish()
            })
        })
        .collect()
}

fn random_weights(rng: &mut ChaCha20Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

fn first_order(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..50 {
        let points: Vec<SpdMatrix> = (0..8).map(|_| random_spd(rng, n, SPREAD)).collect();
        let w = random_weights(rng, points.len());
        let result = (|| {
            let mean = m.frechet_mean(&points, Some(&w))?;
            let mut acc = SymMatrix::zeros(n);
            for (p, wi) in points.iter().zip(&w) {
                acc = &acc + &(&m.log_at(&mean, p)? * *wi);
            }
            Ok(acc.norm())
        })();
        t.record(result, || {
            let pts: Vec<Value> = points.iter().map(|p| entries(p.as_matrix())).collect();
            json!({"backend": m.descriptor(), "trial": trial, "points": pts, "weights": w})
        });
    }
    t.finish()
}

fn homogeneity(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..50 {
        let points: Vec<SpdMatrix> = (0..8).map(|_| random_spd(rng, n, SPREAD)).collect();
        let b = random_spd(rng, n, SPREAD);
        let result = (|| {
            let moved: Vec<SpdMatrix> = points.iter().map(|p| m.group_compose(&b, p)).collect::<Result<_>>()?;
            let lhs = m.frechet_mean(&moved, None)?;
            let rhs = m.group_compose(&b, &m.frechet_mean(&points, None)?)?;
            Ok(rel(lhs.as_matrix(), rhs.as_matrix()))
        })();
        t.record(result, || {
            let pts: Vec<Value> = points.iter().map(|p| entries(p.as_matrix())).collect();
            json!({"backend": m.descriptor(), "trial": trial, "points": pts, "B": entries(b.as_matrix())})
        });
    }
    t.finish()
}

const DILATIONS: [f64; 4] = [0.5, 1.0, 2.0, -1.0];

fn dispersion(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let e = m.identity();
    let mut t = Tracker::new();
    for trial in 0..50 {
        let points: Vec<SpdMatrix> = (0..8).map(|_| random_spd(rng, n, SPREAD)).collect();
        let w = random_weights(rng, points.len());
        let s = DILATIONS[trial % DILATIONS.len()];
        let result = (|| {
            let before = m.frechet_variance(&points, &e, Some(&w))?;
            let scaled: Vec<SpdMatrix> = points.iter().map(|p| m.dilate(p, s)).collect::<Result<_>>()?;
            let after = m.frechet_variance(&scaled, &e, Some(&w))?;
            Ok((after - s * s * before).abs() / (s * s * before))
        })();
        t.record(result, || {
            let pts: Vec<Value> = points.iter().map(|p| entries(p.as_matrix())).collect();
            json!({"backend": m.descriptor(), "trial": trial, "s": s, "points": pts, "weights": w})
        });
    }
    t.finish()
}

/// Length of the geodesic `t ↦ exp_P(t log_P Q)` by midpoint quadrature of the
/// metric applied to finite-difference velocities.
fn geodesic_length(m: &SpdMetric, p: &SpdMatrix, q: &SpdMatrix, segments: usize) -> Result<f64> {
    let v = m.log_at(p, q)?;
    let at = |t: f64| m.exp_at(p, &v.scale(t));
    let h = 1.0 / segments as f64;
    let mut length = 0.0;
    for k in 0..segments {
        let (t0, t1) = (k as f64 * h, (k + 1) as f64 * h);
        let mid = at(0.5 * (t0 + t1))?;
        let vel = SymMatrix::new((at(t1)?.as_matrix() - at(t0)?.as_matrix()) / h)?;
        let tv = TangentVector::Sym(vel);
        length += m.metric_inner_at(&mid, &tv, &tv)?.sqrt() * h;
    }
    Ok(length)
}

fn lcm_pullback(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let theta = m.theta();
    let mut t = Tracker::new();
    for trial in 0..50 {
        let (p, q) = (random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD));
        let result = (|| {
            let d = m.geodesic_distance(&p, &q)?;
            let chart = (clog(&mpow(&p, theta))?.as_matrix() - clog(&mpow(&q, theta))?.as_matrix()).norm() / theta.abs();
            let mut v = scaled_gap(d, chart);
            if n == 2 {
                v = v.max((geodesic_length(m, &p, &q, 200)? - d).abs() / d);
            }
            Ok(v)
        })();
        t.record(result, || with(with(label(m, trial), "P", &p), "Q", &q));
    }
    t.finish()
}

fn round_trip(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let n = m.dim();
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let (p, q) = (random_spd(rng, n, SPREAD), random_spd(rng, n, SPREAD));
        let result = (|| Ok(rel(m.exp_at(&p, &m.log_at(&p, &q)?)?.as_matrix(), q.as_matrix())))();
        t.record(result, || with(with(label(m, trial), "P", &p), "Q", &q));
    }
    t.finish()
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "S1",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "associativity and two-sided neutral element, relative Frobenius",
            tolerance: 1e-8,
            covers: &["spd.group-axioms"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), axioms),
        },
        PropertySpec {
            id: "S2",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "group_inverse is a two-sided inverse, Frobenius distance to E",
            tolerance: 1e-9,
            covers: &["spd.group-axioms"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), inverses),
        },
        PropertySpec {
            id: "S3",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "left translations preserve distance, |gap| / max(1, d)",
            tolerance: 1e-8,
            covers: &["spd.left-invariance"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), left_invariance),
        },
        PropertySpec {
            id: "S4",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "right translations preserve LEM and LCM distance, |gap| / max(1, d)",
            tolerance: 1e-8,
            covers: &["spd.bi-invariance"],
            cells: |g| cells(metrics(g, &[SpdFamily::Lem, SpdFamily::Lcm], &THETAS), bi_invariance),
        },
        PropertySpec {
            id: "S5",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "theta-LEM distance equals LEM distance",
            tolerance: 1e-9,
            covers: &["spd.deformation-law"],
            cells: |g| cells(metrics(g, &[SpdFamily::Lem], &[-1.5, -0.5, 0.5, 1.5]), lem_deformation),
        },
        PropertySpec {
            id: "S6",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "theta-LCM inner product at theta = 1e-4 vs the log-Euclidean limit, relative to the norms",
            tolerance: 1e-3,
            covers: &["spd.deformation-law"],
            cells: lcm_limit_cells,
        },
        PropertySpec {
            id: "S7",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "weighted tangent residual at the Frechet mean",
            tolerance: 1e-8,
            covers: &["spd.first-order-condition"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), first_order),
        },
        PropertySpec {
            id: "S8",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "mean of translated points is the translated mean",
            tolerance: 1e-7,
            covers: &["spd.mean-homogeneity"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), homogeneity),
        },
        PropertySpec {
            id: "S9",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "dilation by s scales the weighted dispersion about E by s^2, relative",
            tolerance: 1e-8,
            covers: &["spd.controllable-dispersion"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), dispersion),
        },
        PropertySpec {
            id: "S10",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "theta-LCM distance vs clog chart formula; 2x2 also vs quadrature geodesic length",
            tolerance: 1e-3,
            covers: &["spd.pullback-distance"],
            cells: |g| cells(metrics(g, &[SpdFamily::Lcm], &THETAS), lcm_pullback),
        },
        PropertySpec {
            id: "S11",
            module: "spd_geometry",
            suite: Suite::Geometry,
            description: "exp_at inverts log_at",
            tolerance: 1e-9,
            covers: &["spd.group-axioms"],
            cells: |g| cells(metrics(g, &ALL, &THETAS), round_trip),
        },
    ]
}
