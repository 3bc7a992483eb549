//! LieBN on an SPD family computed in the codomain of its pullback map.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{check_gamma, resolve_weights, BackendDescriptor, BackendFamily, BatchStats, LieGroup};
use crate::matkernels::{clog, clog_inv, mexp, mlog, mpow, LowerTriMatrix, SpdMatrix, SymMatrix};
use crate::spd::{SpdFamily, SpdMetric};

use super::state::LieBn;

/// A backend whose metric is the inner one multiplied by `factor²`.
/// Means and group structure are unchanged, distances scale by `factor`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<G> {
    inner: G,
    factor: f64,
}

impl<G: LieGroup> Scaled<G> {
    pub fn new(inner: G, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidInput(format!(
                "metric scale factor must be positive, got {factor}"
            )));
        }
        Ok(Scaled { inner, factor })
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }
}

impl<G: LieGroup> LieGroup for Scaled<G> {
    type Point = G::Point;
    type Tangent = G::Tangent;

    fn descriptor(&self) -> BackendDescriptor {
        self.inner.descriptor()
    }

    fn identity(&self) -> G::Point {
        self.inner.identity()
    }

    fn compose(&self, left: &G::Point, right: &G::Point) -> Result<G::Point> {
        self.inner.compose(left, right)
    }

    fn inverse(&self, p: &G::Point) -> Result<G::Point> {
        self.inner.inverse(p)
    }

    fn log_identity(&self, p: &G::Point) -> Result<G::Tangent> {
        self.inner.log_identity(p)
    }

    fn exp_identity(&self, v: &G::Tangent) -> Result<G::Point> {
        self.inner.exp_identity(v)
    }

    fn scale_tangent(&self, v: &G::Tangent, factor: f64) -> G::Tangent {
        self.inner.scale_tangent(v, factor)
    }

    fn distance(&self, a: &G::Point, b: &G::Point) -> Result<f64> {
        Ok(self.factor * self.inner.distance(a, b)?)
    }

    fn frechet_mean(&self, points: &[G::Point], weights: Option<&[f64]>) -> Result<G::Point> {
        self.inner.frechet_mean(points, weights)
    }

    fn frechet_variance(&self, points: &[G::Point], mean: &G::Point, weights: Option<&[f64]>) -> Result<f64> {
        Ok(self.factor * self.factor * self.inner.frechet_variance(points, mean, weights)?)
    }

    fn wfm_pair(&self, p1: &G::Point, p2: &G::Point, gamma: f64) -> Result<G::Point> {
        self.inner.wfm_pair(p1, p2, gamma)
    }

    fn point_entries(&self, p: &G::Point) -> Vec<f64> {
        self.inner.point_entries(p)
    }

    fn point_from_entries(&self, entries: &[f64]) -> Result<G::Point> {
        self.inner.point_from_entries(entries)
    }
}

/// Square matrices under addition with the norm `√(α‖X‖² + β tr(X)²)`.
/// Used as the flat codomain `Sym(n)` (LEM) or `Tril(n)` (LCM).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatrixEuclidean {
    dim: usize,
    alpha: f64,
    beta: f64,
}

impl MatrixEuclidean {
    pub fn new(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        if dim == 0 || alpha.min(alpha + dim as f64 * beta) <= 0.0 {
            return Err(Error::InvalidMetric(format!(
                "invalid flat metric: dim {dim}, alpha {alpha}, beta {beta}"
            )));
        }
        Ok(MatrixEuclidean { dim, alpha, beta })
    }

    fn check(&self, x: &DMatrix<f64>) -> Result<()> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::InvalidInput("codomain matrix has the wrong shape".into()));
        }
        Ok(())
    }

    fn sq_norm(&self, x: &DMatrix<f64>) -> f64 {
        let tr = x.trace();
        self.alpha * x.norm_squared() + self.beta * tr * tr
    }
}

impl LieGroup for MatrixEuclidean {
    type Point = DMatrix<f64>;
    type Tangent = DMatrix<f64>;

    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            family: BackendFamily::Euclidean,
            dim: self.dim,
            theta: 1.0,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    fn identity(&self) -> DMatrix<f64> {
        DMatrix::zeros(self.dim, self.dim)
    }

    fn compose(&self, left: &DMatrix<f64>, right: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check(left)?;
        self.check(right)?;
        Ok(left + right)
    }

    fn inverse(&self, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(-p)
    }

    fn log_identity(&self, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(p.clone())
    }

    fn exp_identity(&self, v: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(v.clone())
    }

    fn scale_tangent(&self, v: &DMatrix<f64>, factor: f64) -> DMatrix<f64> {
        v * factor
    }

    fn distance(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sq_norm(&(a - b)).max(0.0).sqrt())
    }

    fn frechet_mean(&self, points: &[DMatrix<f64>], weights: Option<&[f64]>) -> Result<DMatrix<f64>> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (p, wi) in points.iter().zip(&w) {
            self.check(p)?;
            acc += p * *wi;
        }
        Ok(acc)
    }

    fn frechet_variance(&self, points: &[DMatrix<f64>], mean: &DMatrix<f64>, weights: Option<&[f64]>) -> Result<f64> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = 0.0;
        for (p, wi) in points.iter().zip(&w) {
            self.check(p)?;
            acc += wi * self.sq_norm(&(p - mean));
        }
        Ok(acc)
    }

    fn wfm_pair(&self, p1: &DMatrix<f64>, p2: &DMatrix<f64>, gamma: f64) -> Result<DMatrix<f64>> {
        check_gamma(gamma)?;
        Ok(p1 * gamma + p2 * (1.0 - gamma))
    }

    fn point_entries(&self, p: &DMatrix<f64>) -> Vec<f64> {
        p.transpose().iter().copied().collect()
    }

    fn point_from_entries(&self, entries: &[f64]) -> Result<DMatrix<f64>> {
        if entries.len() != self.dim * self.dim {
            return Err(Error::InvalidInput("wrong number of entries".into()));
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, entries))
    }
}

/// Runs one forward pass of `state` in the codomain `codomain` reached by
/// `to`, maps the results back with `from`.
fn run_in_codomain<C, F, T>(
    state: &LieBn<SpdMetric>,
    batch: &[SpdMatrix],
    codomain: C,
    to: F,
    from: T,
) -> Result<(Vec<SpdMatrix>, LieBn<SpdMetric>)>
where
    C: LieGroup,
    F: Fn(&SpdMatrix) -> Result<C::Point>,
    T: Fn(&C::Point) -> Result<SpdMatrix>,
{
    let mapped: Vec<C::Point> = batch.iter().map(&to).collect::<Result<_>>()?;
    let running = BatchStats {
        mean: to(state.running_mean())?,
        variance: state.running_var(),
    };
    let mut image = LieBn::from_parts(
        codomain,
        to(state.bias())?,
        state.scale(),
        state.epsilon(),
        state.momentum(),
        running,
        state.mode(),
    );
    let out = image.forward(&mapped)?;
    let out = out.iter().map(&from).collect::<Result<Vec<_>>>()?;
    let updated = LieBn::from_parts(
        *state.group(),
        state.bias().clone(),
        state.scale(),
        state.epsilon(),
        state.momentum(),
        BatchStats {
            mean: from(image.running_mean())?,
            variance: image.running_var(),
        },
        state.mode(),
    );
    Ok((out, updated))
}

/// LieBN on an SPD family through its pullback map: `P ↦ P^θ` (AIM),
/// `P ↦ mlog(P^θ)` (LEM), `P ↦ clog(P^θ)` (LCM). The batch is mapped to the
/// codomain, normalized there under the codomain metric scaled by `1/θ²`,
/// and mapped back. Returns the output and the updated state; `state`
/// itself is left unchanged.
pub fn liebn_via_pullback(
    state: &LieBn<SpdMetric>,
    batch: &[SpdMatrix],
) -> Result<(Vec<SpdMatrix>, LieBn<SpdMetric>)> {
    let metric = *state.group();
    let (n, theta) = (metric.dim(), metric.theta());
    let factor = 1.0 / theta.abs();
    match metric.family() {
        SpdFamily::Aim => {
            let codomain = Scaled::new(SpdMetric::aim(n, 1.0, metric.alpha(), metric.beta())?, factor)?;
            run_in_codomain(
                state,
                batch,
                codomain,
                |p| Ok(mpow(p, theta)),
                |q| Ok(mpow(q, 1.0 / theta)),
            )
        }
        SpdFamily::Lem => {
            let codomain = Scaled::new(MatrixEuclidean::new(n, metric.alpha(), metric.beta())?, factor)?;
            run_in_codomain(
                state,
                batch,
                codomain,
                |p| Ok(mlog(&mpow(p, theta)).into_matrix()),
                |x| Ok(mpow(&mexp(&SymMatrix::new(x.clone())?), 1.0 / theta)),
            )
        }
        SpdFamily::Lcm => {
            let codomain = Scaled::new(MatrixEuclidean::new(n, 1.0, 0.0)?, factor)?;
            run_in_codomain(
                state,
                batch,
                codomain,
                |p| Ok(clog(&mpow(p, theta))?.into_matrix()),
                |x| Ok(mpow(&clog_inv(&LowerTriMatrix::new(x.clone())?)?, 1.0 / theta)),
            )
        }
    }
}
