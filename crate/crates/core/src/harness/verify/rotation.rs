//! Rotation-group properties.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use super::{entries, Cell, CellOutcome, Grid, PropertySpec, Tracker};
use crate::error::Result;
use crate::group::LieGroup;
use crate::harness::config::Suite;
use crate::random::{random_rotation, random_rotation_near, random_skew};
use crate::so::{
    exp_skew, exp_skew_series, log_rotation, log_rotation_series, max_rotation_angle, so_distance, so_exp,
    so_frechet_mean, so_geodesic, so_log, so_retract, RotationMatrix, SkewMatrix, SoGroup,
};
use crate::BackendFamily;

const DIMS: [usize; 4] = [2, 3, 4, 5];
const TRIALS: usize = 200;
/// Inputs whose largest rotation angle exceeds this are outside the tested domain.
const MAX_ANGLE: f64 = 3.0;

fn per_dim(grid: &Grid, default: &[usize], min: usize, max: usize, run: fn(usize, &mut ChaCha20Rng) -> CellOutcome) -> Vec<Cell> {
    grid.dims(default, min, max)
        .into_iter()
        .map(|n| Cell::new(Some(BackendFamily::So), move |rng| run(n, rng)))
        .collect()
}

fn mat(r: &RotationMatrix) -> Value {
    entries(r.as_matrix())
}

fn skew(v: &SkewMatrix) -> Value {
    entries(&v.to_matrix())
}

/// A generator whose exponential stays inside the tested domain, or `None`.
fn tame_generator(rng: &mut ChaCha20Rng, n: usize, scale: f64) -> Option<SkewMatrix> {
    let v = random_skew(rng, n, scale);
    (max_rotation_angle(&exp_skew(&v)) < MAX_ANGLE && spectral_radius(&v) < MAX_ANGLE).then_some(v)
}

/// Largest planar angle of a generator, from the eigenvalues of `VᵀV`.
fn spectral_radius(v: &SkewMatrix) -> f64 {
    let m = v.to_matrix();
    let vtv = crate::matkernels::SymMatrix::new(m.transpose() * &m).expect("VᵀV is symmetric");
    crate::matkernels::sym_eigendecompose(&vtv).map_or(f64::INFINITY, |e| e.max_value().max(0.0).sqrt())
}

fn exp_log(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let Some(v) = tame_generator(rng, n, 0.8) else {
            t.reject();
            continue;
        };
        let r = random_rotation(rng, n);
        let s = so_exp(&r, &v).expect("matching dimensions");
        let result = (|| {
            let back = so_log(&r, &s)?;
            let a = (back.to_matrix() - v.to_matrix()).norm();
            let b = (so_exp(&r, &back)?.as_matrix() - s.as_matrix()).norm();
            Ok(a.max(b))
        })();
        t.record(result, || json!({"dim": n, "trial": trial, "R": mat(&r), "V": skew(&v)}));
    }
    t.finish()
}

fn left_invariance(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let q = random_rotation(rng, n);
        let a = random_rotation(rng, n);
        let b = random_rotation_near(rng, &a, 0.6);
        if max_rotation_angle(&a.transpose().mul(&b)) > MAX_ANGLE {
            t.reject();
            continue;
        }
        let result = (|| Ok((so_distance(&q.mul(&a), &q.mul(&b))? - so_distance(&a, &b)?).abs()))();
        t.record(result, || json!({"dim": n, "trial": trial, "Q": mat(&q), "A": mat(&a), "B": mat(&b)}));
    }
    t.finish()
}

fn arc_length(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let a = random_rotation(rng, n);
        let b = random_rotation_near(rng, &a, 0.6);
        if max_rotation_angle(&a.transpose().mul(&b)) > MAX_ANGLE {
            t.reject();
            continue;
        }
        let time: f64 = rng.random_range(0.0..=1.0);
        let result = (|| {
            let d = so_distance(&a, &b)?;
            let g = so_geodesic(&a, &b, time)?;
            let to_start = (so_distance(&a, &g)? - time * d).abs();
            let to_end = (so_distance(&g, &b)? - (1.0 - time) * d).abs();
            Ok(to_start.max(to_end))
        })();
        t.record(result, || json!({"dim": n, "trial": trial, "t": time, "A": mat(&a), "B": mat(&b)}));
    }
    t.finish()
}

/// Error ratio `e(10⁻²) / e(10⁻³)` of the QR retraction against the exponential.
fn retraction_ratio(r: &RotationMatrix, v: &SkewMatrix) -> Result<f64> {
    let err = |eps: f64| -> Result<f64> {
        let h = r.as_matrix() * v.to_matrix() * eps;
        let exact = so_exp(r, &v.scale(eps))?;
        Ok((so_retract(r, &h)?.as_matrix() - exact.as_matrix()).norm())
    };
    Ok(err(1e-2)? / err(1e-3)?)
}

fn retraction(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let r = random_rotation(rng, n);
        let v = random_skew(rng, n, 1.0);
        let v = v.scale(1.0 / v.norm());
        let result = retraction_ratio(&r, &v).map(|ratio| (50.0 - ratio).max(ratio - 200.0).max(0.0));
        t.record(result, || json!({"dim": n, "trial": trial, "R": mat(&r), "V": skew(&v)}));
    }
    t.finish()
}

fn closed_form(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..500 {
        let Some(v) = tame_generator(rng, n, 1.2) else {
            t.reject();
            continue;
        };
        let result = (|| {
            let a = (exp_skew(&v).as_matrix() - exp_skew_series(&v).as_matrix()).norm();
            let r = exp_skew(&v);
            let b = (log_rotation(&r)?.to_matrix() - log_rotation_series(&r)?.to_matrix()).norm();
            Ok(a.max(b))
        })();
        t.record(result, || json!({"dim": n, "trial": trial, "V": skew(&v)}));
    }
    t.finish()
}

fn hooks(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let g = SoGroup::new(n).expect("positive dimension");
    let eye = g.identity();
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let (a, b, c) = (random_rotation(rng, n), random_rotation(rng, n), random_rotation(rng, n));
        let result = (|| {
            let product = (g.compose(&a, &b)?.as_matrix() - a.as_matrix() * b.as_matrix()).norm();
            let assoc = (g.compose(&g.compose(&a, &b)?, &c)?.as_matrix()
                - g.compose(&a, &g.compose(&b, &c)?)?.as_matrix())
            .norm();
            let inv = g.inverse(&a)?;
            let transpose = (inv.as_matrix() - a.as_matrix().transpose()).norm();
            let cancel = (g.compose(&a, &inv)?.as_matrix() - eye.as_matrix()).norm();
            let neutral = (g.compose(&eye, &a)?.as_matrix() - a.as_matrix())
                .norm()
                .max((g.compose(&a, &eye)?.as_matrix() - a.as_matrix()).norm());
            Ok(product.max(assoc).max(transpose).max(cancel).max(neutral))
        })();
        t.record(result, || json!({"dim": n, "trial": trial, "A": mat(&a), "B": mat(&b), "C": mat(&c)}));
    }
    t.finish()
}

fn karcher(n: usize, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..50 {
        let center = random_rotation(rng, n);
        let batch: Vec<RotationMatrix> = (0..8).map(|_| random_rotation_near(rng, &center, 0.2)).collect();
        let result = (|| {
            let m = so_frechet_mean(&batch, None)?;
            let mut acc = SkewMatrix::zeros(n);
            for r in &batch {
                acc = acc.add(&so_log(&m, r)?)?;
            }
            Ok(acc.norm() / batch.len() as f64)
        })();
        t.record(result, || {
            let pts: Vec<Value> = batch.iter().map(mat).collect();
            json!({"dim": n, "trial": trial, "batch": pts})
        });
    }
    t.finish()
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "R1",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "so_exp and so_log are inverse within the injectivity radius",
            tolerance: 1e-9,
            covers: &["so.exp-log-inverse"],
            cells: |g| per_dim(g, &DIMS, 2, 12, exp_log),
        },
        PropertySpec {
            id: "R2",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "left translations preserve rotation distance",
            tolerance: 1e-9,
            covers: &["so.left-invariance"],
            cells: |g| per_dim(g, &DIMS, 2, 12, left_invariance),
        },
        PropertySpec {
            id: "R3",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "geodesic arc length is proportional to the time parameter",
            tolerance: 1e-9,
            covers: &["so.exp-log-inverse"],
            cells: |g| per_dim(g, &DIMS, 2, 12, arc_length),
        },
        PropertySpec {
            id: "R4",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "QR retraction error ratio over a 10x step reduction lies in [50, 200] (n >= 3)",
            tolerance: 0.0,
            covers: &[],
            cells: |g| per_dim(g, &[3, 4, 5], 3, 12, retraction),
        },
        PropertySpec {
            id: "R5",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "SO(3) closed-form exp/log vs generic series",
            tolerance: 1e-9,
            covers: &["so.closed-form-vs-series"],
            cells: |g| per_dim(g, &[3], 3, 3, closed_form),
        },
        PropertySpec {
            id: "R6",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "compose is the matrix product, inverse the transpose, I the neutral element",
            tolerance: 1e-12,
            covers: &["so.group-hooks"],
            cells: |g| per_dim(g, &DIMS, 2, 12, hooks),
        },
        PropertySpec {
            id: "R7",
            module: "so_geometry",
            suite: Suite::Rotation,
            description: "tangent residual at the Karcher mean",
            tolerance: 1e-9,
            covers: &[],
            cells: |g| per_dim(g, &DIMS, 2, 12, karcher),
        },
    ]
}
