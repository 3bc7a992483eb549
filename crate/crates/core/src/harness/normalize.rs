//! `normalize` and `bench`: forward passes over synthetic batches.

use std::time::Instant;

use super::config::{Algo, RunConfig};
use super::report::{BenchCell, BenchReport, NormalizeReport, RunningRecord, StepRecord, SCHEMA_VERSION};
use super::{matfile, mix_seed, with_backend, HarnessBackend, HarnessError, HarnessResult};
use crate::error::{Error, Result};
use crate::gaussian::{rng_stream, GaussianParams};
use crate::group::LieGroup;
use crate::liebn::{batch_statistics, DsmBank, LieBn, MLieBn, TrainMomentum};
use crate::random::rng_from_seed;

/// One of the three layer kinds behind a single forward interface.
pub(crate) enum Layer<G: LieGroup + Clone> {
    Plain(LieBn<G>),
    Momentum(MLieBn<G>),
    Bank { bank: DsmBank<G>, domains: usize },
}

impl<G: LieGroup + Clone> Layer<G> {
    pub(crate) fn build(group: &G, cfg: &RunConfig, bias: G::Point) -> Result<Self> {
        let schedule = TrainMomentum::Scheduled {
            big_k: cfg.big_k,
            rho: 1.0 / cfg.domains as f64,
        };
        Ok(match cfg.algo {
            Algo::Liebn => Layer::Plain(
                LieBn::new(group.clone(), cfg.scale, cfg.epsilon, cfg.momentum)?.with_bias(bias)?,
            ),
            Algo::Mliebn => Layer::Momentum(
                MLieBn::new(group.clone(), cfg.scale, cfg.epsilon, cfg.momentum, schedule)?.with_bias(bias)?,
            ),
            Algo::Dsmliebn => {
                let ids: Vec<usize> = (0..cfg.domains).collect();
                Layer::Bank {
                    bank: DsmBank::new(group.clone(), &ids, cfg.scale, cfg.epsilon, cfg.momentum, schedule)?,
                    domains: cfg.domains,
                }
            }
        })
    }

    /// Train-mode forward. Bank elements are assigned to domains round-robin.
    pub(crate) fn forward(&mut self, batch: &[G::Point]) -> Result<Vec<G::Point>> {
        match self {
            Layer::Plain(l) => l.forward(batch),
            Layer::Momentum(l) => l.forward(batch),
            Layer::Bank { bank, domains } => {
                let ids: Vec<usize> = (0..batch.len()).map(|i| i % *domains).collect();
                bank.forward(batch, &ids)
            }
        }
    }

    fn running(&self, group: &G) -> Vec<RunningRecord> {
        let momentum = |domain: usize, l: &MLieBn<G>| RunningRecord {
            domain,
            mean: group.point_entries(&l.eval_running().mean),
            variance: l.eval_running().variance,
            train_mean: Some(group.point_entries(&l.train_running().mean)),
            train_variance: Some(l.train_running().variance),
        };
        match self {
            Layer::Plain(l) => vec![RunningRecord {
                domain: 0,
                mean: group.point_entries(l.running_mean()),
                variance: l.running_var(),
                train_mean: None,
                train_variance: None,
            }],
            Layer::Momentum(l) => vec![momentum(0, l)],
            Layer::Bank { bank, .. } => bank
                .domains()
                .map(|d| momentum(d, bank.layer(d).expect("listed domain")))
                .collect(),
        }
    }
}

/// Centre of the synthetic data: `exp_E` of a random tangent vector.
pub(crate) fn synthetic_center<G: HarnessBackend>(group: &G, spread: f64, seed: u64) -> Result<G::Point> {
    let mut rng = rng_stream(seed, 3);
    group.exp_identity(&group.random_tangent(&mut rng, spread))
}

/// A batch around `center`: Gaussian samples where the backend supports
/// them, `center ⊙ exp_E(V)` with random tangent `V` otherwise.
pub(crate) fn synthesize<G: HarnessBackend>(
    group: &G,
    center: &G::Point,
    n: usize,
    spread: f64,
    seed: u64,
) -> Result<Vec<G::Point>> {
    if group.check_sampling().is_ok() {
        return GaussianParams::new(group.clone(), center.clone(), spread)?.sample(n, seed);
    }
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| {
            let v = group.random_tangent(&mut rng, spread);
            group.compose(center, &group.exp_identity(&v)?)
        })
        .collect()
}

fn bias_of<G: LieGroup>(group: &G, cfg: &RunConfig) -> Result<G::Point> {
    match &cfg.bias {
        Some(entries) => group.point_from_entries(entries),
        None => Ok(group.identity()),
    }
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn file_batches<G: LieGroup>(group: &G, cfg: &RunConfig) -> HarnessResult<Option<Vec<Vec<G::Point>>>> {
    let Some(path) = &cfg.input else {
        return Ok(None);
    };
    let file = std::fs::File::open(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    let (_, mats) = matfile::read_matrices(std::io::BufReader::new(file))
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let points: Vec<G::Point> = mats
        .iter()
        .map(|m| group.point_from_entries(m))
        .collect::<Result<_>>()
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    if points.is_empty() {
        return Err(HarnessError::Config(format!("{} holds no matrices", path.display())));
    }
    Ok(Some(points.chunks(cfg.batch_size).map(<[G::Point]>::to_vec).collect()))
}

fn normalize_on<G: HarnessBackend>(group: G, cfg: &RunConfig) -> HarnessResult<NormalizeReport> {
    let start = Instant::now();
    let bias = bias_of(&group, cfg)?;
    let mut layer = Layer::build(&group, cfg, bias.clone())?;
    let spread = cfg.spread.unwrap_or_else(|| group.default_spread());
    let center = synthetic_center(&group, spread, cfg.seed)?;
    let from_file = file_batches(&group, cfg)?;
    let n_steps = from_file.as_ref().map_or(cfg.steps, Vec::len);

    let mut steps = Vec::with_capacity(n_steps);
    for step in 0..n_steps {
        let batch = match &from_file {
            Some(batches) => batches[step].clone(),
            None => synthesize(&group, &center, cfg.batch_size, spread, mix_seed(cfg.seed, step as u64 + 1))?,
        };
        let t = Instant::now();
        let pre = batch_statistics(&group, &batch)?;
        let out = layer.forward(&batch)?;
        let post = match batch_statistics(&group, &out) {
            Ok(stats) => Some(stats),
            Err(Error::BallError(_) | Error::CutLocusError(_)) => None,
            Err(e) => return Err(e.into()),
        };
        let expected_post_variance = matches!(layer, Layer::Plain(_))
            .then(|| cfg.scale * cfg.scale * pre.variance / (pre.variance + cfg.epsilon));
        steps.push(StepRecord {
            step,
            batch_size: batch.len(),
            pre_mean_distance: group.distance(&pre.mean, &bias)?,
            post_mean_distance: post.as_ref().map(|p| group.distance(&p.mean, &bias)).transpose()?,
            pre_variance: pre.variance,
            post_variance: post.as_ref().map(|p| p.variance),
            variance_ratio: post.as_ref().map(|p| p.variance / pre.variance),
            expected_post_variance,
            running: layer.running(&group),
            elapsed_ms: millis(t),
        });
    }
    Ok(NormalizeReport {
        schema_version: SCHEMA_VERSION,
        command: "normalize",
        backend: group.descriptor(),
        config: cfg.for_report(),
        target: group.point_entries(&bias),
        steps,
        elapsed_ms: millis(start),
    })
}

/// Runs the configured layer for `steps` train-mode forward passes.
pub fn cmd_normalize(cfg: &RunConfig) -> HarnessResult<NormalizeReport> {
    let backend = cfg.backend_for(cfg.family[0], cfg.dim[0])?;
    with_backend!(backend, g => normalize_on(g, cfg))
}

fn bench_on<G: HarnessBackend>(group: G, cfg: &RunConfig) -> HarnessResult<BenchCell> {
    let bias = bias_of(&group, cfg)?;
    let mut layer = Layer::build(&group, cfg, bias)?;
    let spread = cfg.spread.unwrap_or_else(|| group.default_spread());
    let center = synthetic_center(&group, spread, cfg.seed)?;
    let batch = synthesize(&group, &center, cfg.batch_size, spread, mix_seed(cfg.seed, 1))?;
    let repetitions = cfg.steps.max(30);
    layer.forward(&batch)?;
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let t = Instant::now();
        layer.forward(&batch)?;
        times.push(millis(t));
    }
    let mean_ms = times.iter().sum::<f64>() / repetitions as f64;
    times.sort_by(f64::total_cmp);
    let median_ms = if repetitions % 2 == 1 {
        times[repetitions / 2]
    } else {
        0.5 * (times[repetitions / 2 - 1] + times[repetitions / 2])
    };
    let p95_ms = times[((0.95 * repetitions as f64).ceil() as usize).clamp(1, repetitions) - 1];
    Ok(BenchCell {
        backend: group.descriptor(),
        batch_size: cfg.batch_size,
        repetitions,
        median_ms,
        p95_ms,
        mean_ms,
    })
}

/// Times train-mode forward passes per (family, dim) cell.
pub fn cmd_bench(cfg: &RunConfig) -> HarnessResult<BenchReport> {
    let start = Instant::now();
    let mut cells = Vec::new();
    for &family in &cfg.family {
        for &dim in &cfg.dim {
            let backend = cfg.backend_for(family, dim)?;
            cells.push(with_backend!(backend, g => bench_on(g, cfg))?);
        }
    }
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| cells[a].median_ms.total_cmp(&cells[b].median_ms));
    let ranking_by_median_ms = order
        .iter()
        .map(|&i| format!("{} dim {}", cells[i].backend.family, cells[i].backend.dim))
        .collect();
    Ok(BenchReport {
        schema_version: SCHEMA_VERSION,
        command: "bench",
        config: cfg.for_report(),
        cells,
        ranking_by_median_ms,
        elapsed_ms: millis(start),
    })
}
