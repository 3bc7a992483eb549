//! `sample`: draws from the Riemannian Gaussian and summarizes the draw.

use std::time::Instant;

use super::config::RunConfig;
use super::report::{SampleCommandReport, SCHEMA_VERSION};
use super::{matfile, with_backend, HarnessBackend, HarnessError, HarnessResult};
use crate::gaussian::GaussianParams;

fn sample_on<G: HarnessBackend>(group: G, cfg: &RunConfig) -> HarnessResult<SampleCommandReport> {
    let start = Instant::now();
    group.check_sampling()?;
    let mean = match &cfg.bias {
        Some(entries) => group.point_from_entries(entries)?,
        None => group.identity(),
    };
    let params = GaussianParams::new(group.clone(), mean.clone(), cfg.sigma)?;
    let samples = params.sample(cfg.samples, cfg.seed)?;
    let sample = params.report(&samples, cfg.seed)?;
    let mut max_distance_to_mean: f64 = 0.0;
    for p in &samples {
        max_distance_to_mean = max_distance_to_mean.max(group.distance(p, &mean)?);
    }
    let scaling = match cfg.scaling {
        Some(s) => Some(
            GaussianParams::new(group.clone(), group.identity(), cfg.sigma)?
                .verify_scaling_law(s, cfg.samples, cfg.seed)?,
        ),
        None => None,
    };
    if let Some(path) = &cfg.samples_out {
        let entries: Vec<Vec<f64>> = samples.iter().map(|p| group.point_entries(p)).collect();
        let n = (entries[0].len() as f64).sqrt().round() as usize;
        if n * n != entries[0].len() || group.descriptor().family == crate::BackendFamily::Euclidean {
            return Err(HarnessError::Config("matrix files hold square matrices; use an SPD backend".into()));
        }
        let file = std::fs::File::create(path)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        matfile::write_matrices(std::io::BufWriter::new(file), n, &entries)?;
    }
    Ok(SampleCommandReport {
        schema_version: SCHEMA_VERSION,
        command: "sample",
        backend: group.descriptor(),
        config: cfg.for_report(),
        sample,
        max_distance_to_mean,
        scaling,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Samples `N(M, σ²)` with `M` the configured bias (default `E`).
pub fn cmd_sample(cfg: &RunConfig) -> HarnessResult<SampleCommandReport> {
    let backend = cfg.backend_for(cfg.family[0], cfg.dim[0])?;
    with_backend!(backend, g => sample_on(g, cfg))
}
