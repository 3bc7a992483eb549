//! Geometry of the special orthogonal group under the bi-invariant metric
//! `⟨V, W⟩ = tr(VᵀW)` on `so(n)`.

mod types;

pub use types::{RotationMatrix, SkewMatrix, MAX_DRIFT};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{check_gamma, resolve_weights, BackendDescriptor, BackendFamily, LieGroup};
use crate::matkernels::{expm, logm, sym_eigendecompose, SymMatrix};
pub(crate) use types::qr_sign_fixed;

/// Rotation angles within this distance of `π` are treated as the cut locus.
pub const CUT_LOCUS_MARGIN: f64 = 1e-6;
pub const SO_KARCHER_TOLERANCE: f64 = 1e-12;
pub const SO_KARCHER_ACCEPT: f64 = 1e-9;
pub const SO_KARCHER_MAX_ITERATIONS: usize = 100;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// Smallest eigenvalue of the symmetric part, i.e. the cosine of the largest
/// planar rotation angle.
fn min_cos_angle(a: &DMatrix<f64>) -> f64 {
    let sym = SymMatrix::from_symmetrized((a + a.transpose()) * 0.5);
    sym_eigendecompose(&sym)
        .map(|e| e.min_value())
        .unwrap_or(f64::NAN)
}

/// Largest planar rotation angle of `a`, in `[0, π]`.
pub fn max_rotation_angle(r: &RotationMatrix) -> f64 {
    if r.dim() == 1 {
        return 0.0;
    }
    min_cos_angle(r.as_matrix()).clamp(-1.0, 1.0).acos()
}

/// Group exponential `mexp(V)`: closed forms for `n ≤ 3`, scaling-and-squaring otherwise.
pub fn exp_skew(v: &SkewMatrix) -> RotationMatrix {
    match v.dim() {
        1 => RotationMatrix::identity(1),
        2 => RotationMatrix::planar(-v.params()[0]),
        3 => exp_so3(v),
        _ => exp_skew_series(v),
    }
}

/// Generic scaling-and-squaring exponential, for any `n`.
pub fn exp_skew_series(v: &SkewMatrix) -> RotationMatrix {
    RotationMatrix::from_trusted(expm(&v.to_matrix()))
}

/// Rodrigues' formula.
fn exp_so3(v: &SkewMatrix) -> RotationMatrix {
    let k = v.to_matrix();
    let w = v.axis().expect("dimension 3");
    let phi = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let k2 = &k * &k;
    let (a, b) = if phi < 1e-6 {
        let p2 = phi * phi;
        (1.0 - p2 / 6.0 + p2 * p2 / 120.0, 0.5 - p2 / 24.0 + p2 * p2 / 720.0)
    } else {
        (phi.sin() / phi, (1.0 - phi.cos()) / (phi * phi))
    };
    RotationMatrix::from_trusted(DMatrix::identity(3, 3) + k * a + k2 * b)
}

/// Group logarithm `mlog(R)`: closed forms for `n ≤ 3`, inverse
/// scaling-and-squaring otherwise.
pub fn log_rotation(r: &RotationMatrix) -> Result<SkewMatrix> {
    match r.dim() {
        1 => Ok(SkewMatrix::zeros(1)),
        2 => {
            let m = r.as_matrix();
            let angle = m[(1, 0)].atan2(m[(0, 0)]);
            if std::f64::consts::PI - angle.abs() <= CUT_LOCUS_MARGIN {
                return Err(cut_locus(angle.abs()));
            }
            SkewMatrix::from_params(2, vec![-angle])
        }
        3 => log_so3(r),
        _ => log_rotation_series(r),
    }
}

fn cut_locus(angle: f64) -> Error {
    Error::CutLocusError(format!(
        "rotation angle {angle} is within {CUT_LOCUS_MARGIN:e} of pi"
    ))
}

fn check_cut_locus(r: &RotationMatrix) -> Result<()> {
    let angle = max_rotation_angle(r);
    if std::f64::consts::PI - angle <= CUT_LOCUS_MARGIN {
        return Err(cut_locus(angle));
    }
    Ok(())
}

/// Generic logarithm by inverse scaling-and-squaring, for any `n`.
pub fn log_rotation_series(r: &RotationMatrix) -> Result<SkewMatrix> {
    if r.dim() > 1 {
        check_cut_locus(r)?;
    }
    let l = logm(r.as_matrix())?;
    Ok(SkewMatrix::antisymmetric_part(&l))
}

fn log_so3(r: &RotationMatrix) -> Result<SkewMatrix> {
    let m = r.as_matrix();
    // (R − Rᵀ)/2 = sin φ [a]×
    let w = [
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ];
    let s = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let c = 0.5 * (m.trace() - 1.0);
    let phi = s.atan2(c);
    if std::f64::consts::PI - phi <= CUT_LOCUS_MARGIN {
        return Err(cut_locus(phi));
    }
    if phi < 1e-6 {
        let f = 1.0 + phi * phi / 6.0;
        return Ok(SkewMatrix::from_axis([w[0] * f, w[1] * f, w[2] * f]));
    }
    if phi < 3.0 {
        let f = phi / phi.sin();
        return Ok(SkewMatrix::from_axis([w[0] * f, w[1] * f, w[2] * f]));
    }
    // Near π the antisymmetric part is small; recover the axis from
    // (R + Rᵀ)/2 = cos φ I + (1 − cos φ) a aᵀ.
    let mut aat = (m + m.transpose()) * 0.5;
    for i in 0..3 {
        aat[(i, i)] -= c;
    }
    aat /= 1.0 - c;
    let k = (0..3)
        .max_by(|&i, &j| aat[(i, i)].total_cmp(&aat[(j, j)]))
        .expect("non-empty");
    let col = aat.column(k).into_owned();
    let mut a = col / aat[(k, k)].sqrt();
    a /= a.norm();
    if a[0] * w[0] + a[1] * w[1] + a[2] * w[2] < 0.0 {
        a = -a;
    }
    Ok(SkewMatrix::from_axis([a[0] * phi, a[1] * phi, a[2] * phi]))
}

/// `rielog_R S = mlog(RᵀS)` in Lie-algebra coordinates.
pub fn so_log(r: &RotationMatrix, s: &RotationMatrix) -> Result<SkewMatrix> {
    check_dims(r.dim(), s.dim())?;
    log_rotation(&r.transpose().mul(s))
}

/// `rieexp_R V = R mexp(V)`.
pub fn so_exp(r: &RotationMatrix, v: &SkewMatrix) -> Result<RotationMatrix> {
    check_dims(r.dim(), v.dim())?;
    Ok(r.mul(&exp_skew(v)))
}

/// `‖mlog(RᵀS)‖_F`.
pub fn so_distance(r: &RotationMatrix, s: &RotationMatrix) -> Result<f64> {
    Ok(so_log(r, s)?.norm())
}

/// `√(Σᵢ ‖mlog(Rᵢᵀ Sᵢ)‖²)` on the product group `SO(n)^k`.
pub fn so_product_distance(r: &[RotationMatrix], s: &[RotationMatrix]) -> Result<f64> {
    if r.len() != s.len() {
        return Err(Error::InvalidInput(format!(
            "product factors differ in length: {} vs {}",
            r.len(),
            s.len()
        )));
    }
    let mut acc = 0.0;
    for (a, b) in r.iter().zip(s) {
        acc += so_distance(a, b)?.powi(2);
    }
    Ok(acc.sqrt())
}

/// `γ(t) = R mexp(t mlog(RᵀS))`.
pub fn so_geodesic(r: &RotationMatrix, s: &RotationMatrix, t: f64) -> Result<RotationMatrix> {
    let v = so_log(r, s)?;
    Ok(r.mul(&exp_skew(&v.scale(t))))
}

fn check_ambient(r: &RotationMatrix, h: &DMatrix<f64>) -> Result<()> {
    if h.nrows() != r.dim() || h.ncols() != r.dim() {
        return Err(Error::InvalidInput(format!(
            "expected a {n}x{n} tangent, got {}x{}",
            h.nrows(),
            h.ncols(),
            n = r.dim()
        )));
    }
    Ok(())
}

/// Parallel transport of the ambient tangent `H = RV` from `R` to `S`: `S Rᵀ H`.
pub fn so_transport(r: &RotationMatrix, s: &RotationMatrix, h: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dims(r.dim(), s.dim())?;
    check_ambient(r, h)?;
    let v = SkewMatrix::from_matrix(&(r.as_matrix().transpose() * h))?;
    Ok(s.as_matrix() * v.to_matrix())
}

/// Ambient metric `⟨RᵀH₁, RᵀH₂⟩_F` at `R`.
pub fn so_inner(r: &RotationMatrix, h1: &DMatrix<f64>, h2: &DMatrix<f64>) -> Result<f64> {
    check_ambient(r, h1)?;
    check_ambient(r, h2)?;
    let rt = r.as_matrix().transpose();
    Ok((&rt * h1).dot(&(&rt * h2)))
}

/// Orthogonal projection to the tangent space in Lie-algebra coordinates: `skew(RᵀU)`.
pub fn so_project(r: &RotationMatrix, u: &DMatrix<f64>) -> Result<SkewMatrix> {
    check_ambient(r, u)?;
    Ok(SkewMatrix::antisymmetric_part(&(r.as_matrix().transpose() * u)))
}

/// QR retraction `qf(R + H)` with positive-diagonal triangular factor.
pub fn so_retract(r: &RotationMatrix, h: &DMatrix<f64>) -> Result<RotationMatrix> {
    check_ambient(r, h)?;
    let m = r.as_matrix() + h;
    let (q, _) = qr_sign_fixed(&m)
        .ok_or_else(|| Error::RetractError("R + H is rank deficient".into()))?;
    if q.determinant() < 0.0 {
        return Err(Error::RetractError("R + H has negative determinant".into()));
    }
    Ok(RotationMatrix::from_trusted(q))
}

fn tangent_mean(m: &RotationMatrix, batch: &[RotationMatrix], w: &[f64]) -> Result<SkewMatrix> {
    let mut acc = SkewMatrix::zeros(m.dim());
    for (r, wi) in batch.iter().zip(w) {
        acc = acc.add(&so_log(m, r)?.scale(*wi))?;
    }
    Ok(acc)
}

fn ball_error(e: Error) -> Error {
    match e {
        Error::CutLocusError(msg) => Error::BallError(msg),
        other => other,
    }
}

/// Karcher mean. Fails with `BallError` unless every point lies within
/// rotation angle `π/2` of the returned mean.
pub fn so_frechet_mean(batch: &[RotationMatrix], weights: Option<&[f64]>) -> Result<RotationMatrix> {
    let w = resolve_weights(weights, batch.len())?;
    let n = batch[0].dim();
    for r in batch {
        check_dims(n, r.dim())?;
    }
    if batch.len() == 1 {
        return Ok(batch[0].clone());
    }
    let start = w
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut m = batch[start].clone();
    let mut converged = false;
    for _ in 0..SO_KARCHER_MAX_ITERATIONS {
        let g = tangent_mean(&m, batch, &w).map_err(ball_error)?;
        if g.norm() < SO_KARCHER_TOLERANCE {
            converged = true;
            break;
        }
        m = m.mul(&exp_skew(&g));
    }
    if !converged {
        let residual = tangent_mean(&m, batch, &w).map_err(ball_error)?.norm();
        if residual >= SO_KARCHER_ACCEPT {
            return Err(Error::ConvergenceError {
                iterations: SO_KARCHER_MAX_ITERATIONS,
                residual,
                last_iterate: m.to_row_major(),
            });
        }
    }
    let mt = m.transpose();
    for (i, r) in batch.iter().enumerate() {
        if n > 1 && min_cos_angle(mt.mul(r).as_matrix()) <= 0.0 {
            return Err(Error::BallError(format!(
                "point {i} is at least pi/2 from the mean"
            )));
        }
    }
    Ok(m)
}

/// `SO(n)` as a LieBN backend: matrix product, transpose, identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SoGroup {
    dim: usize,
}

impl SoGroup {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput("SO(n) backend needs n >= 2".into()));
        }
        Ok(SoGroup { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, r: &RotationMatrix) -> Result<()> {
        check_dims(self.dim, r.dim())
    }
}

impl LieGroup for SoGroup {
    type Point = RotationMatrix;
    type Tangent = SkewMatrix;

    fn descriptor(&self) -> BackendDescriptor {
        BackendDescriptor {
            family: BackendFamily::So,
            dim: self.dim,
            theta: 1.0,
            alpha: 1.0,
            beta: 0.0,
        }
    }

    fn identity(&self) -> RotationMatrix {
        RotationMatrix::identity(self.dim)
    }

    fn compose(&self, left: &RotationMatrix, right: &RotationMatrix) -> Result<RotationMatrix> {
        self.check(left)?;
        self.check(right)?;
        Ok(left.mul(right))
    }

    fn inverse(&self, p: &RotationMatrix) -> Result<RotationMatrix> {
        self.check(p)?;
        Ok(p.transpose())
    }

    fn log_identity(&self, p: &RotationMatrix) -> Result<SkewMatrix> {
        self.check(p)?;
        log_rotation(p)
    }

    fn exp_identity(&self, v: &SkewMatrix) -> Result<RotationMatrix> {
        check_dims(self.dim, v.dim())?;
        Ok(exp_skew(v))
    }

    fn scale_tangent(&self, v: &SkewMatrix, factor: f64) -> SkewMatrix {
        v.scale(factor)
    }

    fn distance(&self, a: &RotationMatrix, b: &RotationMatrix) -> Result<f64> {
        self.check(a)?;
        so_distance(a, b)
    }

    fn frechet_mean(&self, points: &[RotationMatrix], weights: Option<&[f64]>) -> Result<RotationMatrix> {
        for p in points {
            self.check(p)?;
        }
        so_frechet_mean(points, weights)
    }

    fn wfm_pair(&self, p1: &RotationMatrix, p2: &RotationMatrix, gamma: f64) -> Result<RotationMatrix> {
        check_gamma(gamma)?;
        self.check(p1)?;
        self.check(p2)?;
        so_geodesic(p2, p1, gamma).map_err(ball_error)
    }

    fn point_entries(&self, p: &RotationMatrix) -> Vec<f64> {
        p.to_row_major()
    }

    fn point_from_entries(&self, entries: &[f64]) -> Result<RotationMatrix> {
        RotationMatrix::from_row_slice(self.dim, entries)
    }
}
