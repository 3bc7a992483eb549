use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{check_gamma, resolve_weights, BackendDescriptor, BackendFamily, LieGroup};
use crate::matkernels::{
    chol_inv, chol_inv_differential, chol_inv_differential_inverse, cholesky, clog, clog_inv,
    lower_inverse, mexp, mlog, mpow, LowerTriMatrix, ScalarFn, SpdMatrix, Spectral, SymMatrix,
};

/// AIM Karcher flow stops once the mean whitened logarithm drops below this norm.
pub const KARCHER_TOLERANCE: f64 = 1e-10;
/// Residual accepted after the iteration cap before reporting non-convergence.
pub const KARCHER_ACCEPT: f64 = 1e-8;
pub const KARCHER_MAX_ITERATIONS: usize = 100;

/// Iterate of the AIM Karcher flow, in the whitened frame `M^{-1/2} P M^{-1/2}`.
struct KarcherIterate {
    point: SpdMatrix,
    sqrt: DMatrix<f64>,
    /// Weighted mean of the whitened logarithms.
    gradient: SymMatrix,
    cost: f64,
    residual: f64,
    step: f64,
}

impl KarcherIterate {
    fn at(point: SpdMatrix, points: &[SpdMatrix], w: &[f64], step: f64) -> Result<KarcherIterate> {
        let spec = Spectral::of_spd(&point);
        let sqrt = spec.apply(ScalarFn::Pow(0.5))?;
        let isqrt = spec.apply(ScalarFn::Pow(-0.5))?;
        let n = point.dim();
        let mut acc = DMatrix::zeros(n, n);
        let mut cost = 0.0;
        for (p, wi) in points.iter().zip(w) {
            let log = mlog(&SpdMatrix::from_trusted(&isqrt * p.as_matrix() * &isqrt));
            cost += wi * log.norm().powi(2);
            acc += log.as_matrix() * *wi;
        }
        if !cost.is_finite() || acc.iter().any(|x| !x.is_finite()) {
            return Err(Error::DomainError(
                "Karcher flow lost positive definiteness; batch too ill-conditioned".into(),
            ));
        }
        let gradient = SymMatrix::from_symmetrized(acc);
        Ok(KarcherIterate { residual: gradient.norm(), point, sqrt, gradient, cost, step })
    }

    /// `M^{1/2} exp(t G) M^{1/2}`.
    fn advance(&self, t: f64) -> Result<SpdMatrix> {
        SpdMatrix::new(&self.sqrt * mexp(&self.gradient.scale(t)).as_matrix() * &self.sqrt)
    }

    /// Lower cost wins; once costs agree to near rounding level the smaller
    /// residual does, since the cost then carries no usable signal.
    fn better_than(&self, other: &KarcherIterate) -> bool {
        let noise = 1e-9 * other.cost.abs().max(f64::MIN_POSITIVE);
        if (self.cost - other.cost).abs() > noise {
            self.cost < other.cost
        } else {
            self.residual < other.residual
        }
    }
}

/// Lie-group structure on SPD matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpdFamily {
    /// Affine-invariant: `Q ⊙ P = K P Kᵀ`, `K = chol(Q)`.
    Aim,
    /// Log-Euclidean: `Q ⊙ P = exp(log P + log Q)`.
    Lem,
    /// Log-Cholesky: `Q ⊙ P = chol⁻¹(⌊L + K⌋ + 𝔻K 𝔻L)`.
    Lcm,
}

impl SpdFamily {
    pub fn backend_family(self) -> BackendFamily {
        match self {
            SpdFamily::Aim => BackendFamily::SpdAim,
            SpdFamily::Lem => BackendFamily::SpdLem,
            SpdFamily::Lcm => BackendFamily::SpdLcm,
        }
    }
}

/// A tangent vector at an SPD point.
///
/// `Sym` is the ambient representation in `Sym(n)`. `Chol` is a tangent of the
/// Cholesky manifold at `L = chol(P)`, mapped to the ambient one by
/// `X ↦ X Lᵀ + L Xᵀ`; the log-Cholesky inner product is written in these
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum TangentVector {
    Sym(SymMatrix),
    Chol(LowerTriMatrix),
}

impl TangentVector {
    pub fn dim(&self) -> usize {
        match self {
            TangentVector::Sym(v) => v.dim(),
            TangentVector::Chol(x) => x.dim(),
        }
    }

    /// Ambient symmetric representative at `base`.
    pub fn to_ambient(&self, base: &SpdMatrix) -> Result<SymMatrix> {
        match self {
            TangentVector::Sym(v) => Ok(v.clone()),
            TangentVector::Chol(x) => Ok(chol_inv_differential(&cholesky(base)?, x)),
        }
    }

    /// Cholesky-coordinate representative at `base`.
    pub fn to_cholesky_coords(&self, base: &SpdMatrix) -> Result<LowerTriMatrix> {
        match self {
            TangentVector::Sym(v) => Ok(chol_inv_differential_inverse(&cholesky(base)?, v)),
            TangentVector::Chol(x) => Ok(x.clone()),
        }
    }
}

fn check_ab(alpha: f64, beta: f64, n: usize) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha.min(alpha + n as f64 * beta) <= 0.0 {
        return Err(Error::InvalidMetric(format!(
            "(alpha, beta) = ({alpha}, {beta}) violates min(alpha, alpha + {n} beta) > 0"
        )));
    }
    Ok(())
}

/// `α⟨V,W⟩_F + β tr(V) tr(W)`, the O(n)-invariant inner product on `Sym(n)`.
pub fn ab_inner(v: &SymMatrix, w: &SymMatrix, alpha: f64, beta: f64) -> Result<f64> {
    if v.dim() != w.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            v.dim(),
            w.dim()
        )));
    }
    check_ab(alpha, beta, v.dim())?;
    Ok(ab_inner_unchecked(v, w, alpha, beta))
}

fn ab_inner_unchecked(v: &SymMatrix, w: &SymMatrix, alpha: f64, beta: f64) -> f64 {
    alpha * v.frobenius_dot(w) + beta * v.trace() * w.trace()
}

/// Lie-group structure plus left-invariant metric on `S⁺⁺(n)`.
///
/// `theta` is the power deformation: every operator is the pullback of the
/// base family through `P ↦ P^θ`, with the metric scaled by `1/θ²`.
/// `(alpha, beta)` only change norms, distances and variances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdMetric {
    family: SpdFamily,
    theta: f64,
    alpha: f64,
    beta: f64,
    dim: usize,
}

impl SpdMetric {
    pub fn new(family: SpdFamily, dim: usize, theta: f64, alpha: f64, beta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMetric("dimension must be positive".into()));
        }
        if !theta.is_finite() || theta == 0.0 {
            return Err(Error::InvalidMetric(format!(
                "deformation theta must be finite and non-zero, got {theta}"
            )));
        }
        if family == SpdFamily::Lcm && (alpha, beta) != (1.0, 0.0) {
            return Err(Error::InvalidMetric(
                "log-Cholesky metric takes (alpha, beta) = (1, 0)".into(),
            ));
        }
        check_ab(alpha, beta, dim)?;
        Ok(SpdMetric {
            family,
            theta,
            alpha,
            beta,
            dim,
        })
    }

    pub fn aim(dim: usize, theta: f64, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(SpdFamily::Aim, dim, theta, alpha, beta)
    }

    pub fn lem(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(SpdFamily::Lem, dim, 1.0, alpha, beta)
    }

    pub fn lcm(dim: usize, theta: f64) -> Result<Self> {
        Self::new(SpdFamily::Lcm, dim, theta, 1.0, 0.0)
    }

    pub fn family(&self) -> SpdFamily {
        self.family
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_point(&self, p: &SpdMatrix) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "expected a {n}x{n} matrix, got {m}x{m}",
                n = self.dim,
                m = p.dim()
            )));
        }
        Ok(())
    }

    fn check_sym(&self, v: &SymMatrix) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::InvalidInput(format!(
                "expected a {n}x{n} tangent, got {m}x{m}",
                n = self.dim,
                m = v.dim()
            )));
        }
        Ok(())
    }

    fn deformed(&self) -> bool {
        self.theta != 1.0
    }

    fn deform(&self, p: &SpdMatrix) -> SpdMatrix {
        mpow(p, self.theta)
    }

    fn undeform(&self, q: &SpdMatrix) -> SpdMatrix {
        mpow(q, 1.0 / self.theta)
    }

    /// `(pow_θ)_{*,P}`.
    fn dpow(&self, p: &SpdMatrix, v: &SymMatrix) -> Result<SymMatrix> {
        if !self.deformed() {
            return Ok(v.clone());
        }
        Spectral::of_spd(p).differential(ScalarFn::Pow(self.theta), v)
    }

    fn dpow_inverse(&self, p: &SpdMatrix, v: &SymMatrix) -> Result<SymMatrix> {
        if !self.deformed() {
            return Ok(v.clone());
        }
        Spectral::of_spd(p).differential_inverse(ScalarFn::Pow(self.theta), v)
    }

    fn ab_norm(&self, v: &SymMatrix) -> f64 {
        ab_inner_unchecked(v, v, self.alpha, self.beta).max(0.0).sqrt()
    }

    /// `g_P(V, W)`.
    pub fn metric_inner_at(
        &self,
        p: &SpdMatrix,
        v: &TangentVector,
        w: &TangentVector,
    ) -> Result<f64> {
        self.check_point(p)?;
        if v.dim() != self.dim || w.dim() != self.dim {
            return Err(Error::InvalidInput("tangent dimension mismatch".into()));
        }
        if self.family == SpdFamily::Lcm && !self.deformed() {
            let l = cholesky(p)?;
            let x = v.to_cholesky_coords(p)?;
            let y = w.to_cholesky_coords(p)?;
            return Ok(lcm_cholesky_inner(&l, &x, &y));
        }
        let v = v.to_ambient(p)?;
        let w = w.to_ambient(p)?;
        let q = self.deform(p);
        let dv = self.dpow(p, &v)?;
        let dw = self.dpow(p, &w)?;
        let base = match self.family {
            SpdFamily::Lem => {
                let spec = Spectral::of_spd(&q);
                let lv = spec.differential(ScalarFn::Log, &dv)?;
                let lw = spec.differential(ScalarFn::Log, &dw)?;
                ab_inner_unchecked(&lv, &lw, self.alpha, self.beta)
            }
            SpdFamily::Aim => {
                let qinv = q
                    .as_matrix()
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::DomainError("singular SPD point".into()))?;
                let a = &qinv * dv.as_matrix();
                let b = &qinv * dw.as_matrix();
                self.alpha * (&a * &b).trace() + self.beta * a.trace() * b.trace()
            }
            SpdFamily::Lcm => {
                let l = cholesky(&q)?;
                let x = chol_inv_differential_inverse(&l, &dv);
                let y = chol_inv_differential_inverse(&l, &dw);
                lcm_cholesky_inner(&l, &x, &y)
            }
        };
        Ok(base / (self.theta * self.theta))
    }

    /// Geodesic distance.
    pub fn geodesic_distance(&self, p: &SpdMatrix, q: &SpdMatrix) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        let (pt, qt) = (self.deform(p), self.deform(q));
        let base = match self.family {
            SpdFamily::Lem => self.ab_norm(&(&mlog(&pt) - &mlog(&qt))),
            SpdFamily::Aim => {
                let spec = Spectral::of_spd(&qt);
                let q_isqrt = spec.apply(ScalarFn::Pow(-0.5))?;
                let inner = SpdMatrix::from_trusted(&q_isqrt * pt.as_matrix() * &q_isqrt);
                self.ab_norm(&mlog(&inner))
            }
            SpdFamily::Lcm => (&clog(&pt)? - &clog(&qt)?).norm(),
        };
        Ok(base / self.theta.abs())
    }

    /// `Q ⊙ P`.
    pub fn group_compose(&self, q: &SpdMatrix, p: &SpdMatrix) -> Result<SpdMatrix> {
        self.check_point(q)?;
        self.check_point(p)?;
        let (qt, pt) = (self.deform(q), self.deform(p));
        let out = match self.family {
            SpdFamily::Lem => mexp(&(&mlog(&pt) + &mlog(&qt))),
            SpdFamily::Aim => {
                let k = cholesky(&qt)?;
                let km = k.as_matrix();
                SpdMatrix::from_trusted(km * pt.as_matrix() * km.transpose())
            }
            SpdFamily::Lcm => {
                let l = cholesky(&pt)?.into_matrix();
                let k = cholesky(&qt)?.into_matrix();
                let mut sum = (&l + &k).lower_triangle();
                for i in 0..self.dim {
                    sum[(i, i)] = k[(i, i)] * l[(i, i)];
                }
                chol_inv(&LowerTriMatrix::new(sum)?)
            }
        };
        Ok(self.undeform(&out))
    }

    pub fn group_inverse(&self, p: &SpdMatrix) -> Result<SpdMatrix> {
        self.check_point(p)?;
        let pt = self.deform(p);
        let out = match self.family {
            SpdFamily::Lem => mexp(&(-&mlog(&pt))),
            SpdFamily::Aim => {
                let kinv = lower_inverse(&cholesky(&pt)?);
                SpdMatrix::from_trusted(&kinv * kinv.transpose())
            }
            SpdFamily::Lcm => clog_inv(&(-&clog(&pt)?))?,
        };
        Ok(self.undeform(&out))
    }

    /// Riemannian logarithm `log_P Q` as an ambient symmetric tangent at `P`.
    pub fn log_at(&self, p: &SpdMatrix, q: &SpdMatrix) -> Result<SymMatrix> {
        self.check_point(p)?;
        self.check_point(q)?;
        let (pt, qt) = (self.deform(p), self.deform(q));
        let base = match self.family {
            SpdFamily::Lem => {
                let diff = &mlog(&qt) - &mlog(&pt);
                Spectral::of_spd(&pt).differential_inverse(ScalarFn::Log, &diff)?
            }
            SpdFamily::Aim => {
                let spec = Spectral::of_spd(&pt);
                let sqrt = spec.apply(ScalarFn::Pow(0.5))?;
                let isqrt = spec.apply(ScalarFn::Pow(-0.5))?;
                let inner = SpdMatrix::from_trusted(&isqrt * qt.as_matrix() * &isqrt);
                SymMatrix::from_symmetrized(&sqrt * mlog(&inner).as_matrix() * &sqrt)
            }
            SpdFamily::Lcm => {
                let l = cholesky(&pt)?;
                let k = cholesky(&qt)?;
                chol_inv_differential(&l, &lcm_log_cholesky(&l, &k))
            }
        };
        self.dpow_inverse(p, &base)
    }

    /// Riemannian exponential at `P`.
    pub fn exp_at(&self, p: &SpdMatrix, v: &SymMatrix) -> Result<SpdMatrix> {
        self.check_point(p)?;
        self.check_sym(v)?;
        let pt = self.deform(p);
        let dv = self.dpow(p, v)?;
        let out = match self.family {
            SpdFamily::Lem => {
                let spec = Spectral::of_spd(&pt);
                let step = spec.differential(ScalarFn::Log, &dv)?;
                mexp(&(&mlog(&pt) + &step))
            }
            SpdFamily::Aim => {
                let spec = Spectral::of_spd(&pt);
                let sqrt = spec.apply(ScalarFn::Pow(0.5))?;
                let isqrt = spec.apply(ScalarFn::Pow(-0.5))?;
                let inner = SymMatrix::from_symmetrized(&isqrt * dv.as_matrix() * &isqrt);
                SpdMatrix::from_trusted(&sqrt * mexp(&inner).as_matrix() * &sqrt)
            }
            SpdFamily::Lcm => {
                let l = cholesky(&pt)?;
                let x = chol_inv_differential_inverse(&l, &dv);
                chol_inv(&lcm_exp_cholesky(&l, &x))
            }
        };
        Ok(self.undeform(&out))
    }

    /// Weighted Fréchet mean. Closed form for LEM and LCM, Karcher flow for AIM.
    pub fn frechet_mean(&self, points: &[SpdMatrix], weights: Option<&[f64]>) -> Result<SpdMatrix> {
        let w = resolve_weights(weights, points.len())?;
        for p in points {
            self.check_point(p)?;
        }
        if points.len() == 1 {
            return Ok(points[0].clone());
        }
        match self.family {
            SpdFamily::Lem => {
                let mut acc = DMatrix::zeros(self.dim, self.dim);
                for (p, wi) in points.iter().zip(&w) {
                    acc += mlog(&self.deform(p)).as_matrix() * *wi;
                }
                Ok(self.undeform(&mexp(&SymMatrix::from_symmetrized(acc))))
            }
            SpdFamily::Lcm => {
                let mut acc = DMatrix::zeros(self.dim, self.dim);
                for (p, wi) in points.iter().zip(&w) {
                    acc += clog(&self.deform(p))?.as_matrix() * *wi;
                }
                Ok(self.undeform(&clog_inv(&LowerTriMatrix::lower_of(&acc))?))
            }
            SpdFamily::Aim => self.karcher_mean(points, &w),
        }
    }

    /// Karcher flow for AIM, run on the deformed points where the geometry is
    /// the standard affine-invariant one. The mean does not depend on `α, β`.
    /// Each iteration tries the current step, half of it and twice it (capped
    /// at 1) and keeps the best candidate; unit steps overshoot or crawl on
    /// widely spread batches.
    fn karcher_mean(&self, points: &[SpdMatrix], w: &[f64]) -> Result<SpdMatrix> {
        let deformed: Vec<SpdMatrix> = points.iter().map(|p| self.deform(p)).collect();
        let mut acc = DMatrix::zeros(self.dim, self.dim);
        for (p, wi) in deformed.iter().zip(w) {
            acc += mlog(p).as_matrix() * *wi;
        }
        if acc.iter().any(|x| !x.is_finite()) {
            return Err(Error::DomainError("non-finite logarithm of a deformed point".into()));
        }
        let mut current = KarcherIterate::at(mexp(&SymMatrix::from_symmetrized(acc)), &deformed, w, 1.0)?;
        for _ in 0..KARCHER_MAX_ITERATIONS {
            if current.residual < KARCHER_TOLERANCE {
                return Ok(self.undeform(&current.point));
            }
            let mut best: Option<KarcherIterate> = None;
            for step in [current.step, 0.5 * current.step, (2.0 * current.step).min(1.0)] {
                let candidate = KarcherIterate::at(current.advance(step)?, &deformed, w, step)?;
                if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
                    best = Some(candidate);
                }
            }
            let best = best.expect("three candidates");
            if best.better_than(&current) {
                current = best;
            } else if current.step < 1e-12 {
                // No step improves the iterate: the residual is at its rounding floor.
                break;
            } else {
                current.step *= 0.25;
            }
        }
        if current.residual < KARCHER_ACCEPT {
            return Ok(self.undeform(&current.point));
        }
        Err(Error::ConvergenceError {
            iterations: KARCHER_MAX_ITERATIONS,
            residual: current.residual,
            last_iterate: self.undeform(&current.point).to_row_major(),
        })
    }

    /// `Σ wᵢ dist²(Pᵢ, mean)`.
    pub fn frechet_variance(
        &self,
        points: &[SpdMatrix],
        mean: &SpdMatrix,
        weights: Option<&[f64]>,
    ) -> Result<f64> {
        let w = resolve_weights(weights, points.len())?;
        let mut acc = 0.0;
        for (p, wi) in points.iter().zip(&w) {
            let d = self.geodesic_distance(p, mean)?;
            acc += wi * d * d;
        }
        Ok(acc)
    }

    /// Weighted Fréchet mean of `{P1, P2}` with weights `{γ, 1 − γ}`.
    pub fn wfm_pair(&self, p1: &SpdMatrix, p2: &SpdMatrix, gamma: f64) -> Result<SpdMatrix> {
        check_gamma(gamma)?;
        self.check_point(p1)?;
        self.check_point(p2)?;
        let (a, b) = (self.deform(p1), self.deform(p2));
        let out = match self.family {
            SpdFamily::Lem => {
                let mix = &(&mlog(&a) * gamma) + &(&mlog(&b) * (1.0 - gamma));
                mexp(&mix)
            }
            SpdFamily::Lcm => {
                let mix = &clog(&a)?.scale(gamma) + &clog(&b)?.scale(1.0 - gamma);
                clog_inv(&mix)?
            }
            SpdFamily::Aim => aim_geodesic_point(&a, &b, gamma)?,
        };
        Ok(self.undeform(&out))
    }
}

/// `P₂^{1/2} (P₂^{−1/2} P₁ P₂^{−1/2})^γ P₂^{1/2}`.
fn aim_geodesic_point(p1: &SpdMatrix, p2: &SpdMatrix, gamma: f64) -> Result<SpdMatrix> {
    let spec = Spectral::of_spd(p2);
    let sqrt = spec.apply(ScalarFn::Pow(0.5))?;
    let isqrt = spec.apply(ScalarFn::Pow(-0.5))?;
    let inner = SpdMatrix::from_trusted(&isqrt * p1.as_matrix() * &isqrt);
    let powered = mpow(&inner, gamma);
    Ok(SpdMatrix::from_trusted(&sqrt * powered.as_matrix() * &sqrt))
}

/// `Σ_{i>j} X_ij Y_ij + Σ_j X_jj Y_jj / L_jj²`.
fn lcm_cholesky_inner(l: &LowerTriMatrix, x: &LowerTriMatrix, y: &LowerTriMatrix) -> f64 {
    let (l, x, y) = (l.as_matrix(), x.as_matrix(), y.as_matrix());
    let n = l.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..i {
            acc += x[(i, j)] * y[(i, j)];
        }
        acc += x[(i, i)] * y[(i, i)] / (l[(i, i)] * l[(i, i)]);
    }
    acc
}

/// `⌊K⌋ − ⌊L⌋ + 𝔻L · log(𝔻L⁻¹ 𝔻K)`.
fn lcm_log_cholesky(l: &LowerTriMatrix, k: &LowerTriMatrix) -> LowerTriMatrix {
    let (lm, km) = (l.as_matrix(), k.as_matrix());
    let mut out = km - lm;
    for i in 0..out.nrows() {
        out[(i, i)] = lm[(i, i)] * (km[(i, i)] / lm[(i, i)]).ln();
    }
    LowerTriMatrix::lower_of(&out)
}

/// `⌊L⌋ + ⌊X⌋ + 𝔻L · exp(𝔻L⁻¹ 𝔻X)`.
fn lcm_exp_cholesky(l: &LowerTriMatrix, x: &LowerTriMatrix) -> LowerTriMatrix {
    let (lm, xm) = (l.as_matrix(), x.as_matrix());
    let mut out = lm + xm;
    for i in 0..out.nrows() {
        out[(i, i)] = lm[(i, i)] * (xm[(i, i)] / lm[(i, i)]).exp();
    }
    LowerTriMatrix::lower_of(&out)
}

impl LieGroup for SpdMetric {
    type Point = SpdMatrix;
    type Tangent = SymMatrix;

    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            family: self.family.backend_family(),
            dim: self.dim,
            theta: self.theta,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    fn identity(&self) -> SpdMatrix {
        SpdMatrix::identity(self.dim)
    }

    fn compose(&self, left: &SpdMatrix, right: &SpdMatrix) -> Result<SpdMatrix> {
        self.group_compose(left, right)
    }

    fn inverse(&self, p: &SpdMatrix) -> Result<SpdMatrix> {
        self.group_inverse(p)
    }

    fn log_identity(&self, p: &SpdMatrix) -> Result<SymMatrix> {
        self.log_at(&SpdMatrix::identity(self.dim), p)
    }

    fn exp_identity(&self, v: &SymMatrix) -> Result<SpdMatrix> {
        self.exp_at(&SpdMatrix::identity(self.dim), v)
    }

    fn scale_tangent(&self, v: &SymMatrix, factor: f64) -> SymMatrix {
        v.scale(factor)
    }

    fn distance(&self, a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
        self.geodesic_distance(a, b)
    }

    fn frechet_mean(&self, points: &[SpdMatrix], weights: Option<&[f64]>) -> Result<SpdMatrix> {
        SpdMetric::frechet_mean(self, points, weights)
    }

    fn frechet_variance(
        &self,
        points: &[SpdMatrix],
        mean: &SpdMatrix,
        weights: Option<&[f64]>,
    ) -> Result<f64> {
        SpdMetric::frechet_variance(self, points, mean, weights)
    }

    fn wfm_pair(&self, p1: &SpdMatrix, p2: &SpdMatrix, gamma: f64) -> Result<SpdMatrix> {
        SpdMetric::wfm_pair(self, p1, p2, gamma)
    }

    fn point_entries(&self, p: &SpdMatrix) -> Vec<f64> {
        p.to_row_major()
    }

    fn point_from_entries(&self, entries: &[f64]) -> Result<SpdMatrix> {
        SpdMatrix::from_row_slice(self.dim, entries)
    }
}
