//! The Lie-group capability record LieBN is generic over, plus the
//! Euclidean backend.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Backend family names as they appear in configs and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendFamily {
    SpdAim,
    SpdLem,
    SpdLcm,
    So,
    Euclidean,
}

impl BackendFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendFamily::SpdAim => "spd-aim",
            BackendFamily::SpdLem => "spd-lem",
            BackendFamily::SpdLcm => "spd-lcm",
            BackendFamily::So => "so",
            BackendFamily::Euclidean => "euclidean",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spd-aim" => Some(BackendFamily::SpdAim),
            "spd-lem" => Some(BackendFamily::SpdLem),
            "spd-lcm" => Some(BackendFamily::SpdLcm),
            "so" => Some(BackendFamily::So),
            "euclidean" => Some(BackendFamily::Euclidean),
            _ => None,
        }
    }
}

impl fmt::Display for BackendFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fréchet mean and Fréchet variance of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchStats<P> {
    pub mean: P,
    pub variance: f64,
}

/// Self-describing backend parameters, stored alongside serialized state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendDescriptor {
    pub family: BackendFamily,
    pub dim: usize,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// A Lie group with a left-invariant metric: everything LieBN needs.
///
/// Points and tangent vectors are backend-defined. Tangent vectors only need
/// to live at the neutral element, where LieBN rescales them.
pub trait LieGroup: Send + Sync {
    type Point: Clone + fmt::Debug + PartialEq + Send + Sync;
    type Tangent: Clone + fmt::Debug + Send + Sync;

    fn descriptor(&self) -> BackendDescriptor;

    /// Neutral element `E`.
    fn identity(&self) -> Self::Point;

    /// `left ⊙ right`, i.e. the left translation `L_left(right)`.
    fn compose(&self, left: &Self::Point, right: &Self::Point) -> Result<Self::Point>;

    fn inverse(&self, p: &Self::Point) -> Result<Self::Point>;

    /// Riemannian logarithm at `E`.
    fn log_identity(&self, p: &Self::Point) -> Result<Self::Tangent>;

    /// Riemannian exponential at `E`.
    fn exp_identity(&self, v: &Self::Tangent) -> Result<Self::Point>;

    fn scale_tangent(&self, v: &Self::Tangent, factor: f64) -> Self::Tangent;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<f64>;

    /// Weighted Fréchet mean; uniform weights when `weights` is `None`.
    fn frechet_mean(
        &self,
        points: &[Self::Point],
        weights: Option<&[f64]>,
    ) -> Result<Self::Point>;

    /// `Σ wᵢ dist²(Pᵢ, mean)`.
    fn frechet_variance(
        &self,
        points: &[Self::Point],
        mean: &Self::Point,
        weights: Option<&[f64]>,
    ) -> Result<f64> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = 0.0;
        for (p, wi) in points.iter().zip(&w) {
            let d = self.distance(p, mean)?;
            acc += wi * d * d;
        }
        Ok(acc)
    }

    /// Weighted Fréchet mean of two points with weight `gamma` on `p1`.
    fn wfm_pair(&self, p1: &Self::Point, p2: &Self::Point, gamma: f64) -> Result<Self::Point>;

    /// `φ_t(P) = exp_E[t · log_E(P)]`.
    fn dilate(&self, p: &Self::Point, t: f64) -> Result<Self::Point> {
        let v = self.log_identity(p)?;
        self.exp_identity(&self.scale_tangent(&v, t))
    }

    /// Flat (row-major) coordinates of a point, for serialization.
    fn point_entries(&self, p: &Self::Point) -> Vec<f64>;

    fn point_from_entries(&self, entries: &[f64]) -> Result<Self::Point>;
}

/// Validates convex weights, or returns uniform `1/N` weights.
pub fn resolve_weights(weights: Option<&[f64]>, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    match weights {
        None => Ok(vec![1.0 / n as f64; n]),
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{} weights for {n} points",
                    w.len()
                )));
            }
            if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::InvalidInput("weights must be positive".into()));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "weights sum to {total}, expected 1"
                )));
            }
            Ok(w.to_vec())
        }
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!(
            "weight {gamma} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `ℝⁿ` under addition with the standard inner product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Euclidean { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, p: &DVector<f64>) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "expected a vector of length {}, got {}",
                self.dim,
                p.len()
            )));
        }
        Ok(())
    }
}

impl LieGroup for Euclidean {
    type Point = DVector<f64>;
    type Tangent = DVector<f64>;

    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            family: BackendFamily::Euclidean,
            dim: self.dim,
            theta: 1.0,
            alpha: 1.0,
            beta: 0.0,
        }
    }

    fn identity(&self) -> DVector<f64> {
        DVector::zeros(self.dim)
    }

    fn compose(&self, left: &DVector<f64>, right: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(left)?;
        self.check(right)?;
        Ok(left + right)
    }

    fn inverse(&self, p: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(p)?;
        Ok(-p)
    }

    fn log_identity(&self, p: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(p)?;
        Ok(p.clone())
    }

    fn exp_identity(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(v)?;
        Ok(v.clone())
    }

    fn scale_tangent(&self, v: &DVector<f64>, factor: f64) -> DVector<f64> {
        v * factor
    }

    fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok((a - b).norm())
    }

    fn frechet_mean(&self, points: &[DVector<f64>], weights: Option<&[f64]>) -> Result<DVector<f64>> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = DVector::zeros(self.dim);
        for (p, wi) in points.iter().zip(&w) {
            self.check(p)?;
            acc += p * *wi;
        }
        Ok(acc)
    }

    fn frechet_variance(
        &self,
        points: &[DVector<f64>],
        mean: &DVector<f64>,
        weights: Option<&[f64]>,
    ) -> Result<f64> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = 0.0;
        for (p, wi) in points.iter().zip(&w) {
            self.check(p)?;
            acc += wi * (p - mean).norm_squared();
        }
        Ok(acc)
    }

    fn wfm_pair(&self, p1: &DVector<f64>, p2: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
        check_gamma(gamma)?;
        Ok(p1 * gamma + p2 * (1.0 - gamma))
    }

    fn point_entries(&self, p: &DVector<f64>) -> Vec<f64> {
        p.iter().copied().collect()
    }

    fn point_from_entries(&self, entries: &[f64]) -> Result<DVector<f64>> {
        let p = DVector::from_row_slice(entries);
        self.check(&p)?;
        Ok(p)
    }
}
