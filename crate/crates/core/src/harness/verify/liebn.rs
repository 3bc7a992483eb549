//! LieBN layer properties over every backend.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use super::{entries, Cell, CellOutcome, Grid, PropertySpec, Tracker};
use crate::error::{Error, Result};
use crate::group::{BackendFamily, BatchStats, Euclidean, LieGroup};
use crate::harness::config::Suite;
use crate::harness::normalize::synthesize;
use crate::harness::{with_backend, Backend, HarnessBackend};
use crate::liebn::{gamma_train, liebn_via_pullback, DsmBank, LieBn, LieBnRecord, MLieBn, Mode, TrainMomentum};
use crate::matkernels::{mpow, SpdMatrix};
use crate::so::{max_rotation_angle, RotationMatrix, SoGroup};
use crate::spd::{SpdFamily, SpdMetric};

const DIMS: [usize; 3] = [2, 3, 5];
const BATCH: usize = 16;
const TRIALS: usize = 50;
/// Dilated rotations must stay this far inside the injectivity radius.
const ANGLE_MARGIN: f64 = 1e-2;

/// Builds one cell per backend, running the generic `$run` on it.
macro_rules! backend_cells {
    ($backends:expr, $run:ident) => {
        $backends
            .into_iter()
            .map(|b: Backend| {
                let family = b.family();
                with_backend!(b, g => Cell::new(Some(family), move |rng| $run(&g, rng)))
            })
            .collect::<Vec<Cell>>()
    };
}

fn spd_backends(grid: &Grid, families: &[SpdFamily], thetas: &[f64], dims: &[usize]) -> Vec<Backend> {
    let mut out = Vec::new();
    for &family in families {
        for &theta in thetas {
            for n in grid.dims(dims, 1, 12) {
                let mut abs = vec![(1.0, 0.0)];
                if family != SpdFamily::Lcm {
                    abs.push((1.0, 1.0 / (n * n) as f64));
                }
                for (alpha, beta) in abs {
                    out.push(Backend::Spd(SpdMetric::new(family, n, theta, alpha, beta).expect("valid grid metric")));
                }
            }
        }
    }
    out
}

fn flat_backends(grid: &Grid, dims: &[usize]) -> Vec<Backend> {
    let mut out = Vec::new();
    for n in grid.dims(dims, 1, 12) {
        out.push(Backend::Euclidean(Euclidean::new(n).expect("positive dimension")));
        if n >= 2 {
            out.push(Backend::So(SoGroup::new(n).expect("positive dimension")));
        }
    }
    out
}

/// Every family once, at `θ = 1`.
fn one_of_each(grid: &Grid, dims: &[usize]) -> Vec<Backend> {
    let mut out = spd_backends(grid, &[SpdFamily::Aim, SpdFamily::Lem, SpdFamily::Lcm], &[1.0], dims);
    out.retain(|b| matches!(b, Backend::Spd(m) if m.beta() == 0.0));
    out.extend(flat_backends(grid, dims));
    out
}

fn is_rotation<G: LieGroup>(g: &G) -> bool {
    g.descriptor().family == BackendFamily::So
}

/// Rotation batches may leave the ball where the mean is unique; such
/// trials are outside the property's domain.
fn outside_domain<G: LieGroup>(g: &G, e: &Error) -> bool {
    is_rotation(g) && matches!(e, Error::BallError(_) | Error::CutLocusError(_))
}

/// For rotations, `φ_t` is a true dilation only while `|t|` times every
/// rotation angle stays below `π`.
fn dilation_admissible<G: LieGroup>(g: &G, centered: &[G::Point], t: f64) -> bool {
    if !is_rotation(g) {
        return true;
    }
    let n = g.descriptor().dim;
    centered.iter().all(|c| {
        RotationMatrix::from_row_slice(n, &g.point_entries(c))
            .map(|r| t.abs() * max_rotation_angle(&r) < std::f64::consts::PI - ANGLE_MARGIN)
            .unwrap_or(false)
    })
}

fn points_json<G: LieGroup>(g: &G, pts: &[G::Point]) -> Value {
    json!(pts.iter().map(|p| g.point_entries(p)).collect::<Vec<_>>())
}

/// A random point `exp_E(V)`.
fn random_point<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng, spread: f64) -> Result<G::Point> {
    g.exp_identity(&g.random_tangent(rng, spread))
}

fn spread_of<G: HarnessBackend>(g: &G) -> f64 {
    0.5 * g.default_spread()
}

/// A batch around a random centre.
fn random_batch<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng, size: usize) -> Result<Vec<G::Point>> {
    let spread = spread_of(g);
    let center = random_point(g, rng, spread)?;
    synthesize(g, &center, size, spread, rng.random())
}

struct Setup<G: LieGroup> {
    batch: Vec<G::Point>,
    bias: G::Point,
    scale: f64,
    epsilon: f64,
    stats: BatchStats<G::Point>,
    layer: LieBn<G>,
}

fn setup<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng, scale: f64, trial: usize) -> Result<Setup<G>> {
    let batch = random_batch(g, rng, BATCH)?;
    let bias = random_point(g, rng, spread_of(g))?;
    let epsilon = if trial.is_multiple_of(2) { 1e-5 } else { 0.1 };
    let layer = LieBn::new(g.clone(), scale, epsilon, 0.1)?.with_bias(bias.clone())?;
    let stats = layer.batch_statistics(&batch)?;
    Ok(Setup { batch, bias, scale, epsilon, stats, layer })
}

fn setup_json<G: LieGroup>(g: &G, s: &Setup<G>, trial: usize) -> Value {
    json!({"backend": g.descriptor(), "trial": trial, "s": s.scale, "epsilon": s.epsilon,
           "B": g.point_entries(&s.bias), "batch": points_json(g, &s.batch)})
}

fn centered<G: LieGroup>(g: &G, s: &Setup<G>) -> Result<Vec<G::Point>> {
    let inv = g.inverse(&s.stats.mean)?;
    s.batch.iter().map(|p| g.compose(&inv, p)).collect()
}

fn factor<G: LieGroup>(s: &Setup<G>) -> f64 {
    s.scale / (s.stats.variance + s.epsilon).sqrt()
}

fn mean_control<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let scale = if is_rotation(g) { rng.random_range(0.3..0.8) } else { rng.random_range(0.5..2.0) };
        let s = match setup(g, rng, scale, trial) {
            Ok(s) => s,
            Err(e) if outside_domain(g, &e) => {
                t.reject();
                continue;
            }
            Err(e) => {
                t.record(Err(e), || json!({"backend": g.descriptor(), "trial": trial}));
                continue;
            }
        };
        let result = (|| {
            if !dilation_admissible(g, &centered(g, &s)?, factor(&s)) {
                return Ok(None);
            }
            let out = s.layer.normalize_batch(&s.batch, &s.stats)?;
            Ok(Some(g.distance(&g.frechet_mean(&out, None)?, &s.bias)?))
        })();
        match result {
            Ok(None) => t.reject(),
            Err(e) if outside_domain(g, &e) => t.reject(),
            Ok(Some(d)) => t.record(Ok(d), || setup_json(g, &s, trial)),
            Err(e) => t.record(Err(e), || setup_json(g, &s, trial)),
        }
    }
    t.finish()
}

const DILATIONS: [f64; 4] = [0.5, 1.0, 2.0, -1.0];

fn dispersion_control<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let scale = DILATIONS[trial % DILATIONS.len()];
        let s = match setup(g, rng, scale, trial / DILATIONS.len()) {
            Ok(s) => s,
            Err(e) if outside_domain(g, &e) => {
                t.reject();
                continue;
            }
            Err(e) => {
                t.record(Err(e), || json!({"backend": g.descriptor(), "trial": trial}));
                continue;
            }
        };
        let result = (|| {
            if !dilation_admissible(g, &centered(g, &s)?, factor(&s)) {
                return Ok(None);
            }
            let pre = s.layer.normalize_pre_bias(&s.batch, &s.stats)?;
            let got = g.frechet_variance(&pre, &g.identity(), None)?;
            let v = s.stats.variance;
            let want = scale * scale * v / (v + s.epsilon);
            Ok(Some((got - want).abs() / want))
        })();
        match result {
            Ok(None) => t.reject(),
            Ok(Some(d)) => t.record(Ok(d), || setup_json(g, &s, trial)),
            Err(e) => t.record(Err(e), || setup_json(g, &s, trial)),
        }
    }
    t.finish()
}

/// Per-feature batch normalization written out directly.
struct TextbookBn {
    gamma: Vec<f64>,
    beta: Vec<f64>,
    epsilon: f64,
    momentum: f64,
    running_mean: Vec<f64>,
    running_var: Vec<f64>,
}

impl TextbookBn {
    fn train(&mut self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = x.len() as f64;
        let features = self.gamma.len();
        let mut out = vec![vec![0.0; features]; x.len()];
        for f in 0..features {
            let mu = x.iter().map(|row| row[f]).sum::<f64>() / n;
            let var = x.iter().map(|row| (row[f] - mu) * (row[f] - mu)).sum::<f64>() / n;
            for (i, row) in x.iter().enumerate() {
                out[i][f] = self.gamma[f] * (row[f] - mu) / (var + self.epsilon).sqrt() + self.beta[f];
            }
            self.running_mean[f] = (1.0 - self.momentum) * self.running_mean[f] + self.momentum * mu;
            self.running_var[f] = (1.0 - self.momentum) * self.running_var[f] + self.momentum * var;
        }
        out
    }

    fn eval(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|row| {
                (0..row.len())
                    .map(|f| {
                        self.gamma[f] * (row[f] - self.running_mean[f]) / (self.running_var[f] + self.epsilon).sqrt()
                            + self.beta[f]
                    })
                    .collect()
            })
            .collect()
    }
}

fn gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn euclidean_trajectory(features: usize, rng: &mut ChaCha20Rng) -> Result<f64> {
    let g = Euclidean::new(1)?;
    let scalar = |v: f64| DVector::from_element(1, v);
    let gamma: Vec<f64> = (0..features).map(|_| rng.random_range(0.5..2.0)).collect();
    let beta: Vec<f64> = (0..features).map(|_| rng.random_range(-1.0..1.0)).collect();
    let epsilon = 1e-5;
    let momentum = rng.random_range(0.05..0.5);
    let mut layers: Vec<LieBn<Euclidean>> = (0..features)
        .map(|f| LieBn::new(g, gamma[f], epsilon, momentum)?.with_bias(scalar(beta[f])))
        .collect::<Result<_>>()?;
    let mut oracle = TextbookBn {
        gamma,
        beta,
        epsilon,
        momentum,
        running_mean: vec![0.0; features],
        running_var: vec![1.0; features],
    };
    let loc: Vec<f64> = (0..features).map(|_| rng.random_range(-3.0..3.0)).collect();
    let spread: Vec<f64> = (0..features).map(|_| rng.random_range(0.5..2.0)).collect();
    let draw = |rng: &mut ChaCha20Rng| -> Vec<Vec<f64>> {
        (0..BATCH)
            .map(|_| (0..features).map(|f| loc[f] + spread[f] * rng.random_range(-1.7..1.7)).collect())
            .collect()
    };
    let mut worst: f64 = 0.0;
    let mut compare = |ours: &[Vec<DVector<f64>>], want: &[Vec<f64>], layers: &[LieBn<Euclidean>], oracle: &TextbookBn| {
        for (f, col) in ours.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                worst = worst.max(gap(v[0], want[i][f]));
            }
            worst = worst.max(gap(layers[f].running_mean()[0], oracle.running_mean[f]));
            worst = worst.max(gap(layers[f].running_var(), oracle.running_var[f]));
        }
    };
    for step in 0..100 {
        let x = draw(rng);
        let column = |f: usize| -> Vec<DVector<f64>> { x.iter().map(|row| scalar(row[f])).collect() };
        let ours: Vec<Vec<DVector<f64>>> = if step % 10 == 9 {
            (0..features).map(|f| layers[f].forward_eval(&column(f))).collect::<Result<_>>()?
        } else {
            (0..features).map(|f| layers[f].forward(&column(f))).collect::<Result<_>>()?
        };
        let want = if step % 10 == 9 { oracle.eval(&x) } else { oracle.train(&x) };
        compare(&ours, &want, &layers, &oracle);
    }
    for layer in &mut layers {
        layer.set_mode(Mode::Eval);
    }
    let x = draw(rng);
    let ours: Vec<Vec<DVector<f64>>> = (0..features)
        .map(|f| layers[f].forward(&x.iter().map(|row| scalar(row[f])).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    compare(&ours, &oracle.eval(&x), &layers, &oracle);
    Ok(worst)
}

fn euclidean_cells(grid: &Grid) -> Vec<Cell> {
    grid.dims(&[1, 2, 4], 1, 12)
        .into_iter()
        .map(|features| {
            Cell::new(Some(BackendFamily::Euclidean), move |rng| {
                let mut t = Tracker::new();
                for trial in 0..10 {
                    let result = euclidean_trajectory(features, rng);
                    t.record(result, || json!({"features": features, "trial": trial}));
                }
                t.finish()
            })
        })
        .collect()
}

fn rel_points(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    (a.as_matrix() - b.as_matrix()).norm() / b.as_matrix().norm()
}

fn pullback_trajectory(m: &SpdMetric, rng: &mut ChaCha20Rng) -> Result<(f64, Value)> {
    let bias = random_point(m, rng, 0.5)?;
    let scale = rng.random_range(0.5..2.0);
    let mut direct = LieBn::new(*m, scale, 1e-5, 0.2)?.with_bias(bias.clone())?;
    let mut pulled = direct.clone();
    let mut worst: f64 = 0.0;
    let mut batches = Vec::new();
    for _ in 0..3 {
        let batch = random_batch(m, rng, 8)?;
        let out_direct = direct.forward(&batch)?;
        let (out_pulled, next) = liebn_via_pullback(&pulled, &batch)?;
        pulled = next;
        for (a, b) in out_pulled.iter().zip(&out_direct) {
            worst = worst.max(rel_points(a, b));
        }
        worst = worst.max(rel_points(pulled.running_mean(), direct.running_mean()));
        worst = worst.max(gap(pulled.running_var(), direct.running_var()));
        batches.push(points_json(m, &batch));
    }
    Ok((worst, json!({"backend": m.descriptor(), "s": scale, "B": entries(bias.as_matrix()), "batches": batches})))
}

fn pullback(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..10 {
        match pullback_trajectory(m, rng) {
            Ok((v, input)) => t.record(Ok(v), || input),
            Err(e) => t.record(Err(e), || json!({"backend": m.descriptor(), "trial": trial})),
        }
    }
    t.finish()
}

fn pullback_cells(grid: &Grid, families: &[SpdFamily]) -> Vec<Cell> {
    spd_backends(grid, families, &[0.5, 1.0, 1.5], &[2, 3])
        .into_iter()
        .map(|b| match b {
            Backend::Spd(m) => Cell::new(Some(m.family().backend_family()), move |rng| pullback(&m, rng)),
            _ => unreachable!("SPD grid"),
        })
        .collect()
}

/// 0 when the two sequences agree bitwise, 1 otherwise.
fn bitwise<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    if a == b { 0.0 } else { 1.0 }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn flat<G: LieGroup>(g: &G, pts: &[G::Point]) -> Vec<f64> {
    pts.iter().flat_map(|p| g.point_entries(p)).collect()
}

fn eval_purity<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..20 {
        let result = (|| {
            let bias = random_point(g, rng, spread_of(g))?;
            let mut layer = LieBn::new(g.clone(), 0.7, 1e-5, 0.1)?.with_bias(bias)?;
            for _ in 0..3 {
                layer.forward(&random_batch(g, rng, 8)?)?;
            }
            layer.set_mode(Mode::Eval);
            let before = layer.to_record();
            let batch = random_batch(g, rng, 8)?;
            let first = layer.forward(&batch)?;
            let second = layer.forward(&batch)?;
            let third = layer.forward_eval(&batch)?;
            let changed: f64 = if layer.to_record() == before { 0.0 } else { 1.0 };
            Ok(changed
                .max(bitwise(&flat(g, &first), &flat(g, &second)))
                .max(bitwise(&flat(g, &first), &flat(g, &third))))
        })();
        match result {
            Err(e) if outside_domain(g, &e) => t.reject(),
            r => t.record(r, || json!({"backend": g.descriptor(), "trial": trial})),
        }
    }
    t.finish()
}

fn aim_power(m: &SpdMetric, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..TRIALS {
        let scale = rng.random_range(-2.0..2.0);
        let s = match setup(m, rng, scale, trial) {
            Ok(s) => s,
            Err(e) => {
                t.record(Err(e), || json!({"backend": m.descriptor(), "trial": trial}));
                continue;
            }
        };
        let result = (|| {
            let pre = s.layer.normalize_pre_bias(&s.batch, &s.stats)?;
            let tf = factor(&s);
            let mut worst: f64 = 0.0;
            for (c, got) in centered(m, &s)?.iter().zip(&pre) {
                let want = mpow(c, tf);
                let diff = (got.as_matrix() - want.as_matrix()).amax();
                worst = worst.max(diff / want.as_matrix().amax());
            }
            Ok(worst)
        })();
        t.record(result, || setup_json(m, &s, trial));
    }
    t.finish()
}

fn aim_power_cells(grid: &Grid) -> Vec<Cell> {
    grid.dims(&DIMS, 1, 12)
        .into_iter()
        .map(|n| {
            let m = SpdMetric::aim(n, 1.0, 1.0, 0.0).expect("valid metric");
            Cell::new(Some(BackendFamily::SpdAim), move |rng| aim_power(&m, rng))
        })
        .collect()
}

fn gamma_boundaries(_: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for big_k in [2usize, 3, 5, 10, 50] {
        for rho in [1.0, 0.5, 0.25, 0.1] {
            let result = (|| {
                let mut v: f64 = 0.0;
                if gamma_train(big_k, 1, rho)? != 1.0 {
                    v = 1.0;
                }
                for k in big_k..big_k + 5 {
                    if gamma_train(big_k, k, rho)? != rho {
                        v = 1.0;
                    }
                }
                for k in 1..big_k + 2 {
                    let (a, b) = (gamma_train(big_k, k, rho)?, gamma_train(big_k, k + 1, rho)?);
                    if b > a || !(rho..=1.0).contains(&a) {
                        v = 1.0;
                    }
                }
                Ok(v)
            })();
            t.record(result, || json!({"K": big_k, "rho": rho}));
        }
    }
    t.finish()
}

fn momentum_reduction<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..10 {
        let result = (|| {
            let gamma = rng.random_range(0.05..0.95);
            let bias = random_point(g, rng, spread_of(g))?;
            let mut plain = LieBn::new(g.clone(), 1.3, 1e-5, gamma)?.with_bias(bias.clone())?;
            let mut fixed = MLieBn::new(g.clone(), 1.3, 1e-5, gamma, TrainMomentum::Fixed(gamma))?.with_bias(bias.clone())?;
            let mut unit = MLieBn::new(g.clone(), 1.3, 1e-5, gamma, TrainMomentum::Fixed(1.0))?.with_bias(bias)?;
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let batch = random_batch(g, rng, 8)?;
                let out_plain = plain.forward(&batch)?;
                fixed.forward(&batch)?;
                let out_unit = unit.forward(&batch)?;
                let want = flat(g, std::slice::from_ref(plain.running_mean()));
                for running in [fixed.eval_running(), fixed.train_running(), unit.eval_running()] {
                    worst = worst.max(bitwise(&flat(g, std::slice::from_ref(&running.mean)), &want));
                    worst = worst.max(bitwise(&[running.variance], &[plain.running_var()]));
                }
                if g.descriptor().family == BackendFamily::Euclidean {
                    worst = worst.max(bitwise(&flat(g, &out_unit), &flat(g, &out_plain)));
                }
            }
            Ok(worst)
        })();
        match result {
            Err(e) if outside_domain(g, &e) => t.reject(),
            r => t.record(r, || json!({"backend": g.descriptor(), "trial": trial})),
        }
    }
    t.finish()
}

fn momentum_cells(grid: &Grid) -> Vec<Cell> {
    let mut cells = vec![Cell::new(None, gamma_boundaries)];
    cells.extend(backend_cells!(one_of_each(grid, &[3]), momentum_reduction));
    cells
}

const DOMAINS: usize = 3;

fn domain_partition<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..10 {
        let result = (|| {
            let schedule = TrainMomentum::Scheduled { big_k: 5, rho: 1.0 / DOMAINS as f64 };
            let ids: Vec<usize> = (0..DOMAINS).collect();
            let mut bank = DsmBank::new(g.clone(), &ids, 0.9, 1e-5, 0.1, schedule)?;
            let mut singles: Vec<MLieBn<G>> = ids
                .iter()
                .map(|_| MLieBn::new(g.clone(), 0.9, 1e-5, 0.1, schedule))
                .collect::<Result<_>>()?;
            let mut worst: f64 = 0.0;
            for _ in 0..8 {
                let batch = random_batch(g, rng, 12)?;
                // Every domain gets at least two elements.
                let mut domain_of: Vec<usize> = (0..batch.len()).map(|i| i % DOMAINS).collect();
                for i in 2 * DOMAINS..batch.len() {
                    domain_of[i] = rng.random_range(0..DOMAINS);
                }
                let out = bank.forward(&batch, &domain_of)?;
                for d in 0..DOMAINS {
                    let idx: Vec<usize> = (0..batch.len()).filter(|&i| domain_of[i] == d).collect();
                    let sub: Vec<G::Point> = idx.iter().map(|&i| batch[i].clone()).collect();
                    let want = singles[d].forward(&sub)?;
                    let got: Vec<G::Point> = idx.iter().map(|&i| out[i].clone()).collect();
                    worst = worst.max(max_abs_diff(&flat(g, &got), &flat(g, &want)));
                    let layer = bank.layer(d).expect("configured domain");
                    for (a, b) in [(layer.eval_running(), singles[d].eval_running()), (layer.train_running(), singles[d].train_running())] {
                        worst = worst.max(max_abs_diff(
                            &flat(g, std::slice::from_ref(&a.mean)),
                            &flat(g, std::slice::from_ref(&b.mean)),
                        ));
                        worst = worst.max((a.variance - b.variance).abs());
                    }
                }
            }
            Ok(worst)
        })();
        match result {
            Err(e) if outside_domain(g, &e) => t.reject(),
            r => t.record(r, || json!({"backend": g.descriptor(), "trial": trial})),
        }
    }
    t.finish()
}

fn record_round_trip<G: HarnessBackend>(g: &G, rng: &mut ChaCha20Rng) -> CellOutcome {
    let mut t = Tracker::new();
    for trial in 0..10 {
        let result = (|| {
            let bias = random_point(g, rng, spread_of(g))?;
            let mut layer = LieBn::new(g.clone(), rng.random_range(0.5..2.0), 1e-5, 0.1)?.with_bias(bias)?;
            for _ in 0..2 {
                layer.forward(&random_batch(g, rng, 8)?)?;
            }
            let record = layer.to_record();
            let text = serde_json::to_string(&record).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let parsed: LieBnRecord = serde_json::from_str(&text).map_err(|e| Error::InvalidInput(e.to_string()))?;
            let rebuilt = LieBn::from_record(g.clone(), &parsed)?;
            let batch = random_batch(g, rng, 8)?;
            let same_record: f64 = if rebuilt.to_record() == record { 0.0 } else { 1.0 };
            Ok(same_record.max(bitwise(
                &flat(g, &rebuilt.forward_eval(&batch)?),
                &flat(g, &layer.forward_eval(&batch)?),
            )))
        })();
        match result {
            Err(e) if outside_domain(g, &e) => t.reject(),
            r => t.record(r, || json!({"backend": g.descriptor(), "trial": trial})),
        }
    }
    t.finish()
}

fn non_aim(grid: &Grid) -> Vec<Backend> {
    let mut b = spd_backends(grid, &[SpdFamily::Lem, SpdFamily::Lcm], &[0.5, 1.0, 1.5], &DIMS);
    b.extend(flat_backends(grid, &DIMS));
    b
}

fn aim_only(grid: &Grid) -> Vec<Backend> {
    spd_backends(grid, &[SpdFamily::Aim], &[0.5, 1.0, 1.5], &DIMS)
}

fn all_backends(grid: &Grid) -> Vec<Backend> {
    let mut b = aim_only(grid);
    b.extend(non_aim(grid));
    b
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "L1",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "Frechet mean of the normalized batch is B (LEM, LCM, Euclidean, SO)",
            tolerance: 1e-7,
            covers: &["liebn.mean-control"],
            cells: |g| backend_cells!(non_aim(g), mean_control),
        },
        PropertySpec {
            id: "L2",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "Frechet mean of the normalized batch is B (AIM, Karcher tolerance)",
            tolerance: 1e-6,
            covers: &["liebn.mean-control"],
            cells: |g| backend_cells!(aim_only(g), mean_control),
        },
        PropertySpec {
            id: "L3",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "pre-bias dispersion about E equals s^2 v^2 / (v^2 + eps), relative",
            tolerance: 1e-7,
            covers: &["liebn.variance-control"],
            cells: |g| backend_cells!(all_backends(g), dispersion_control),
        },
        PropertySpec {
            id: "L4",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "Euclidean LieBN matches textbook batch normalization over train/eval trajectories",
            tolerance: 1e-12,
            covers: &["liebn.euclidean-reduction"],
            cells: euclidean_cells,
        },
        PropertySpec {
            id: "L5",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "direct vs codomain LieBN, LEM and LCM",
            tolerance: 1e-9,
            covers: &["liebn.pullback-equivalence"],
            cells: |g| pullback_cells(g, &[SpdFamily::Lem, SpdFamily::Lcm]),
        },
        PropertySpec {
            id: "L6",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "direct vs codomain LieBN, AIM",
            tolerance: 1e-7,
            covers: &["liebn.pullback-equivalence"],
            cells: |g| pullback_cells(g, &[SpdFamily::Aim]),
        },
        PropertySpec {
            id: "L7",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "eval forward leaves the state untouched and repeats bitwise",
            tolerance: 0.0,
            covers: &["liebn.eval-purity"],
            cells: |g| backend_cells!(one_of_each(g, &DIMS), eval_purity),
        },
        PropertySpec {
            id: "L8",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "AIM scaling step is the matrix power, elementwise relative",
            tolerance: 1e-12,
            covers: &["liebn.aim-scaling-power"],
            cells: aim_power_cells,
        },
        PropertySpec {
            id: "L9",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "train-momentum boundaries; MLieBN with fixed momentum reproduces LieBN bitwise",
            tolerance: 0.0,
            covers: &["liebn.momentum"],
            cells: momentum_cells,
        },
        PropertySpec {
            id: "L10",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "DSMLieBN equals one MLieBN per domain",
            tolerance: 1e-12,
            covers: &["liebn.domain-partition"],
            cells: |g| backend_cells!(one_of_each(g, &[2, 3]), domain_partition),
        },
        PropertySpec {
            id: "L11",
            module: "liebn_core",
            suite: Suite::Liebn,
            description: "state record survives a JSON round trip bit-exactly",
            tolerance: 0.0,
            covers: &["liebn.state-record"],
            cells: |g| backend_cells!(one_of_each(g, &[2, 3]), record_round_trip),
        },
    ]
}
