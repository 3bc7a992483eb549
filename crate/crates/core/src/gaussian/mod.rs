//! Riemannian Gaussian `p(X) ∝ exp(−dist(X, M)² / 2σ²)`: unnormalized
//! density, exact sampling on backends that are flat in a global chart, and
//! Monte-Carlo checks of its translation and scaling behaviour.

mod stats;

pub use stats::{ks_p_value, ks_statistic, spearman};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Euclidean, LieGroup};
use crate::matkernels::{clog, clog_inv, mexp, mlog, mpow, LowerTriMatrix, SpdMatrix, SymMatrix};
use crate::so::SoGroup;
use crate::spd::{SpdFamily, SpdMetric};

/// Seeded generator on an explicit ChaCha stream.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = crate::random::rng_from_seed(seed);
    rng.set_stream(stream);
    rng
}

/// A backend isometric to Euclidean space through a global chart, written
/// in orthonormal coordinates of the codomain inner product.
pub trait GaussianBackend: LieGroup {
    /// Number of coordinates.
    fn n_dof(&self) -> usize;

    /// `Ok` iff exact sampling is available.
    fn check_sampling(&self) -> Result<()>;

    fn to_coords(&self, p: &Self::Point) -> Result<Vec<f64>>;

    fn from_coords(&self, x: &[f64]) -> Result<Self::Point>;
}

fn sym_coords(s: &DMatrix<f64>) -> Vec<f64> {
    let n = s.nrows();
    let mut x = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        x.push(s[(i, i)]);
        for j in (i + 1)..n {
            x.push(std::f64::consts::SQRT_2 * s[(i, j)]);
        }
    }
    x
}

fn sym_from_coords(n: usize, x: &[f64]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        s[(i, i)] = x[k];
        k += 1;
        for j in (i + 1)..n {
            let v = x[k] / std::f64::consts::SQRT_2;
            s[(i, j)] = v;
            s[(j, i)] = v;
            k += 1;
        }
    }
    s
}

fn tril_coords(l: &DMatrix<f64>) -> Vec<f64> {
    let n = l.nrows();
    let mut x = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in 0..=i {
            x.push(l[(i, j)]);
        }
    }
    x
}

fn tril_from_coords(n: usize, x: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            l[(i, j)] = x[k];
            k += 1;
        }
    }
    l
}

impl GaussianBackend for SpdMetric {
    fn n_dof(&self) -> usize {
        self.dim() * (self.dim() + 1) / 2
    }

    fn check_sampling(&self) -> Result<()> {
        match self.family() {
            SpdFamily::Aim => Err(Error::UnsupportedBackend(
                "no exact Gaussian sampler for the affine-invariant family".into(),
            )),
            SpdFamily::Lem if (self.alpha(), self.beta()) != (1.0, 0.0) => Err(Error::UnsupportedBackend(
                "Gaussian sampling under log-Euclidean metrics needs (alpha, beta) = (1, 0)".into(),
            )),
            _ => Ok(()),
        }
    }

    fn to_coords(&self, p: &SpdMatrix) -> Result<Vec<f64>> {
        self.check_sampling()?;
        let theta = self.theta();
        let pt = mpow(p, theta);
        Ok(match self.family() {
            SpdFamily::Lcm => tril_coords(&(clog(&pt)?.into_matrix() / theta)),
            _ => sym_coords(&(mlog(&pt).into_matrix() / theta)),
        })
    }

    fn from_coords(&self, x: &[f64]) -> Result<SpdMatrix> {
        self.check_sampling()?;
        if x.len() != self.n_dof() {
            return Err(Error::InvalidInput("wrong number of coordinates".into()));
        }
        let (n, theta) = (self.dim(), self.theta());
        let pt = match self.family() {
            SpdFamily::Lcm => clog_inv(&LowerTriMatrix::new(tril_from_coords(n, x) * theta)?)?,
            _ => mexp(&SymMatrix::new(sym_from_coords(n, x) * theta)?),
        };
        Ok(mpow(&pt, 1.0 / theta))
    }
}

impl GaussianBackend for Euclidean {
    fn n_dof(&self) -> usize {
        self.dim()
    }

    fn check_sampling(&self) -> Result<()> {
        Ok(())
    }

    fn to_coords(&self, p: &DVector<f64>) -> Result<Vec<f64>> {
        Ok(p.iter().copied().collect())
    }

    fn from_coords(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.point_from_entries(x)
    }
}

impl GaussianBackend for SoGroup {
    fn n_dof(&self) -> usize {
        self.dim() * (self.dim() - 1) / 2
    }

    fn check_sampling(&self) -> Result<()> {
        Err(Error::UnsupportedBackend(
            "no exact Gaussian sampler on SO(n)".into(),
        ))
    }

    fn to_coords(&self, _: &Self::Point) -> Result<Vec<f64>> {
        self.check_sampling().map(|_| Vec::new())
    }

    fn from_coords(&self, _: &[f64]) -> Result<Self::Point> {
        self.check_sampling().map(|_| self.identity())
    }
}

/// Summary of a sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleReport {
    pub n_samples: usize,
    pub seed: u64,
    pub sigma: f64,
    pub n_dof: usize,
    /// Row-major entries of the empirical Fréchet mean.
    pub mean: Vec<f64>,
    pub mean_distance: f64,
    pub standard_error: f64,
    pub variance: f64,
    pub expected_variance: f64,
    pub variance_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub n_samples: usize,
    pub seed: u64,
    pub mean_shift: f64,
    pub standard_error: f64,
    pub variance_ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub n_samples: usize,
    pub seed: u64,
    pub s: f64,
    pub variance_original: f64,
    pub variance_scaled: f64,
    /// `variance_scaled / variance_original`, expected `s²`.
    pub ratio_to_original: f64,
    /// `variance_scaled / (s² n_dof σ²)`, expected 1.
    pub ratio_to_analytic: f64,
    pub ks_statistics: Vec<f64>,
    pub ks_p_values: Vec<f64>,
    /// Per-coordinate significance after the Bonferroni correction.
    pub ks_threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MleReport {
    pub n_samples: usize,
    pub perturbations: usize,
    pub radius: f64,
    /// Smallest `(cost(perturbed) − cost(mean)) / cost(mean)`.
    pub min_relative_increase: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellReport {
    pub n_samples: usize,
    pub shells: usize,
    pub spearman: f64,
    pub passed: bool,
}

/// `N(M, σ²)` on a backend.
#[derive(Clone, Debug)]
pub struct GaussianParams<G: LieGroup> {
    group: G,
    mean: G::Point,
    sigma: f64,
}

impl<G: LieGroup> GaussianParams<G> {
    pub fn new(group: G, mean: G::Point, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        let e = group.identity();
        group.compose(&e, &mean)?;
        Ok(GaussianParams { group, mean, sigma })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn mean(&self) -> &G::Point {
        &self.mean
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `−dist(X, M)² / 2σ²`; the normalizing constant is omitted.
    pub fn log_density_unnorm(&self, x: &G::Point) -> Result<f64> {
        let d = self.group.distance(x, &self.mean)?;
        Ok(-d * d / (2.0 * self.sigma * self.sigma))
    }
}

impl<G: GaussianBackend + Clone> GaussianParams<G> {
    /// Draws `n` points, deterministically for a given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<G::Point>> {
        self.sample_stream(n, seed, 0)
    }

    fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Result<Vec<G::Point>> {
        self.group.check_sampling()?;
        if n == 0 {
            return Err(Error::InvalidInput("sample size must be positive".into()));
        }
        let center = self.group.to_coords(&self.mean)?;
        let d = center.len();
        let mut rng = rng_stream(seed, stream);
        let draws: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                center
                    .iter()
                    .map(|c| c + self.sigma * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        debug_assert!(draws.iter().all(|x| x.len() == d));
        draws.par_iter().map(|x| self.group.from_coords(x)).collect()
    }

    /// `σ √(n_dof / N)`: root-mean-square error of the empirical mean in the chart.
    pub fn standard_error(&self, n: usize) -> f64 {
        self.sigma * (self.group.n_dof() as f64 / n as f64).sqrt()
    }

    pub fn expected_variance(&self) -> f64 {
        self.group.n_dof() as f64 * self.sigma * self.sigma
    }

    pub fn report(&self, samples: &[G::Point], seed: u64) -> Result<SampleReport> {
        let mean = self.group.frechet_mean(samples, None)?;
        let variance = self.group.frechet_variance(samples, &mean, None)?;
        Ok(SampleReport {
            n_samples: samples.len(),
            seed,
            sigma: self.sigma,
            n_dof: self.group.n_dof(),
            mean_distance: self.group.distance(&mean, &self.mean)?,
            mean: self.group.point_entries(&mean),
            standard_error: self.standard_error(samples.len()),
            variance,
            expected_variance: self.expected_variance(),
            variance_ratio: variance / self.expected_variance(),
        })
    }

    /// Translates samples by `B` and compares their empirical mean with
    /// `B ⊙ M` and their variance with `n_dof σ²`.
    pub fn verify_homogeneity(&self, b: &G::Point, n: usize, seed: u64) -> Result<HomogeneityReport> {
        let samples = self.sample(n, seed)?;
        let translated: Vec<G::Point> = samples
            .par_iter()
            .map(|p| self.group.compose(b, p))
            .collect::<Result<_>>()?;
        let target = self.group.compose(b, &self.mean)?;
        let mean = self.group.frechet_mean(&translated, None)?;
        let variance = self.group.frechet_variance(&translated, &mean, None)?;
        let mean_shift = self.group.distance(&mean, &target)?;
        let standard_error = self.standard_error(n);
        let variance_ratio = variance / self.expected_variance();
        Ok(HomogeneityReport {
            n_samples: n,
            seed,
            mean_shift,
            standard_error,
            variance_ratio,
            passed: mean_shift < 3.0 * standard_error && (0.95..=1.05).contains(&variance_ratio),
        })
    }

    /// Applies `φ_s` to samples of `N(E, σ²)` and compares them with fresh
    /// samples of `N(E, s²σ²)`.
    pub fn verify_scaling_law(&self, s: f64, n: usize, seed: u64) -> Result<ScalingReport> {
        let e = self.group.identity();
        if self.group.distance(&self.mean, &e)? > 1e-12 {
            return Err(Error::InvalidInput("scaling law is checked for Gaussians centred at E".into()));
        }
        if !s.is_finite() || s == 0.0 {
            return Err(Error::InvalidInput(format!("scale must be non-zero, got {s}")));
        }
        let samples = self.sample(n, seed)?;
        let scaled: Vec<G::Point> = samples
            .par_iter()
            .map(|p| self.group.dilate(p, s))
            .collect::<Result<_>>()?;
        let fresh = GaussianParams::new(self.group.clone(), e, self.sigma * s.abs())?
            .sample_stream(n, seed, 1)?;

        let m0 = self.group.frechet_mean(&samples, None)?;
        let v0 = self.group.frechet_variance(&samples, &m0, None)?;
        let m1 = self.group.frechet_mean(&scaled, None)?;
        let v1 = self.group.frechet_variance(&scaled, &m1, None)?;

        let a: Vec<Vec<f64>> = scaled.iter().map(|p| self.group.to_coords(p)).collect::<Result<_>>()?;
        let b: Vec<Vec<f64>> = fresh.iter().map(|p| self.group.to_coords(p)).collect::<Result<_>>()?;
        let d = self.group.n_dof();
        let mut ks_statistics = Vec::with_capacity(d);
        let mut ks_p_values = Vec::with_capacity(d);
        for k in 0..d {
            let xa: Vec<f64> = a.iter().map(|x| x[k]).collect();
            let xb: Vec<f64> = b.iter().map(|x| x[k]).collect();
            let stat = ks_statistic(&xa, &xb);
            ks_statistics.push(stat);
            ks_p_values.push(ks_p_value(stat, n, n));
        }
        let ks_threshold = 0.01 / d as f64;
        let ratio_to_original = v1 / v0;
        let ratio_to_analytic = v1 / (s * s * self.expected_variance());
        let s2 = s * s;
        let passed = (0.95 * s2..=1.05 * s2).contains(&ratio_to_original)
            && (0.95..=1.05).contains(&ratio_to_analytic)
            && ks_p_values.iter().all(|&p| p >= ks_threshold);
        Ok(ScalingReport {
            n_samples: n,
            seed,
            s,
            variance_original: v0,
            variance_scaled: v1,
            ratio_to_original,
            ratio_to_analytic,
            ks_statistics,
            ks_p_values,
            ks_threshold,
            passed,
        })
    }

    /// Compares the sample Fréchet mean's cost `Σ dist²(Xᵢ, ·)` with that of
    /// random points at chart distance `radius` from it.
    pub fn mle_probe(&self, n: usize, seed: u64, perturbations: usize, radius: f64) -> Result<MleReport> {
        let samples = self.sample(n, seed)?;
        let mean = self.group.frechet_mean(&samples, None)?;
        let cost = |m: &G::Point| self.group.frechet_variance(&samples, m, None);
        let base = cost(&mean)?;
        let center = self.group.to_coords(&mean)?;
        let mut rng = rng_stream(seed, 2);
        let mut min_increase = f64::INFINITY;
        for _ in 0..perturbations {
            let dir: Vec<f64> = center.iter().map(|_| rng.sample(StandardNormal)).collect();
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let moved: Vec<f64> = center
                .iter()
                .zip(&dir)
                .map(|(c, u)| c + radius * u / norm)
                .collect();
            let p = self.group.from_coords(&moved)?;
            min_increase = min_increase.min((cost(&p)? - base) / base);
        }
        Ok(MleReport {
            n_samples: n,
            perturbations,
            radius,
            min_relative_increase: min_increase,
            passed: min_increase > 0.0,
        })
    }

    /// Rank correlation between the empirical log-density in equal-width
    /// distance shells and the model's unnormalized log-density.
    pub fn density_shell_check(&self, n: usize, seed: u64, shells: usize) -> Result<ShellReport> {
        if shells < 3 {
            return Err(Error::InvalidInput("need at least 3 shells".into()));
        }
        let samples = self.sample(n, seed)?;
        let mut r: Vec<f64> = samples
            .par_iter()
            .map(|p| self.group.distance(p, &self.mean))
            .collect::<Result<_>>()?;
        r.sort_by(f64::total_cmp);
        let r_max = r[((n as f64) * 0.99) as usize - 1];
        let width = r_max / shells as f64;
        let d = self.group.n_dof() as i32;
        let mut counts = vec![0usize; shells];
        for &ri in r.iter().take_while(|&&ri| ri < r_max) {
            counts[((ri / width) as usize).min(shells - 1)] += 1;
        }
        let mut empirical = Vec::new();
        let mut model = Vec::new();
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
            let volume = hi.powi(d) - lo.powi(d);
            let mid = 0.5 * (lo + hi);
            empirical.push((c as f64 / volume).ln());
            model.push(-mid * mid / (2.0 * self.sigma * self.sigma));
        }
        let rho = spearman(&empirical, &model);
        Ok(ShellReport {
            n_samples: n,
            shells,
            spearman: rho,
            passed: rho > 0.95,
        })
    }
}
