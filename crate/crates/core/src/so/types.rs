use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Orthonormality drift below which a matrix is accepted unchanged.
const EXACT_DRIFT: f64 = 1e-12;
/// Orthonormality drift beyond which construction is refused.
pub const MAX_DRIFT: f64 = 1e-6;

/// QR factorization with the signs fixed so that `R` has a non-negative
/// diagonal. `None` if some `|R_jj|` is negligible (rank deficiency).
pub(crate) fn qr_sign_fixed(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let n = m.ncols();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    for j in 0..n {
        if r[(j, j)].abs() <= 1e-12 * scale {
            return None;
        }
        if r[(j, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
            for k in 0..r.ncols() {
                r[(j, k)] = -r[(j, k)];
            }
        }
    }
    Some((q, r))
}

/// An element of `SO(n)`.
#[derive(Clone, PartialEq)]
pub struct RotationMatrix(DMatrix<f64>);

impl RotationMatrix {
    /// Accepts matrices within `1e-6` of `SO(n)`, re-orthonormalizing by
    /// sign-fixed QR when the drift exceeds round-off.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "rotation must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite rotation entry".into()));
        }
        let n = m.nrows();
        let drift = (m.transpose() * &m - DMatrix::<f64>::identity(n, n)).norm();
        if drift > MAX_DRIFT {
            return Err(Error::InvalidInput(format!(
                "matrix is not orthogonal (drift {drift:e})"
            )));
        }
        let m = if drift <= EXACT_DRIFT {
            m
        } else {
            qr_sign_fixed(&m)
                .map(|(q, _)| q)
                .ok_or_else(|| Error::InvalidInput("rank-deficient rotation".into()))?
        };
        if m.determinant() < 0.0 {
            return Err(Error::InvalidInput("orthogonal matrix with determinant -1".into()));
        }
        Ok(RotationMatrix(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} rotation, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        RotationMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        RotationMatrix(DMatrix::identity(n, n))
    }

    /// Planar rotation by `angle`.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        RotationMatrix(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    /// Rotation of `SO(3)` about `axis` (normalized internally) by `angle`.
    pub fn axis_angle(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidInput("rotation axis must be non-zero".into()));
        }
        let w = [axis[0] / norm * angle, axis[1] / norm * angle, axis[2] / norm * angle];
        Ok(super::exp_skew(&SkewMatrix::from_axis(w)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(&self.0 * &other.0)
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }
}

impl fmt::Debug for RotationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RotationMatrix({:?})", self.to_row_major())
    }
}

/// An element of `so(n)`, stored as its strictly upper-triangular entries
/// in row-major order, so antisymmetry holds exactly.
#[derive(Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    params: Vec<f64>,
}

impl SkewMatrix {
    pub fn n_params(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    pub fn from_params(dim: usize, params: Vec<f64>) -> Result<Self> {
        if dim == 0 || params.len() != Self::n_params(dim) {
            return Err(Error::InvalidInput(format!(
                "so({dim}) has {} parameters, got {}",
                Self::n_params(dim),
                params.len()
            )));
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite skew parameter".into()));
        }
        Ok(SkewMatrix { dim, params })
    }

    /// Checked construction from a dense matrix; the antisymmetric part is
    /// kept, asymmetry beyond `1e-8` (relative) is rejected.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidInput("skew matrix must be square".into()));
        }
        let scale = m.amax().max(1.0);
        let defect = (m + m.transpose()).amax();
        if !(defect <= 1e-8 * scale) {
            return Err(Error::InvalidInput(format!(
                "matrix is not antisymmetric (defect {defect:e})"
            )));
        }
        Ok(Self::antisymmetric_part(m))
    }

    /// Parameters of `(M − Mᵀ)/2`.
    pub(crate) fn antisymmetric_part(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut params = Vec::with_capacity(Self::n_params(n));
        for i in 0..n {
            for j in (i + 1)..n {
                params.push(0.5 * (m[(i, j)] - m[(j, i)]));
            }
        }
        SkewMatrix { dim: n, params }
    }

    pub fn zeros(dim: usize) -> Self {
        SkewMatrix {
            dim,
            params: vec![0.0; Self::n_params(dim)],
        }
    }

    /// Hat map `ω ↦ [ω]×` on `ℝ³`.
    pub fn from_axis(w: [f64; 3]) -> Self {
        SkewMatrix {
            dim: 3,
            params: vec![-w[2], w[1], -w[0]],
        }
    }

    /// Inverse of [`SkewMatrix::from_axis`]; `None` unless `dim == 3`.
    pub fn axis(&self) -> Option<[f64; 3]> {
        (self.dim == 3).then(|| [-self.params[2], self.params[1], -self.params[0]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                m[(i, j)] = self.params[k];
                m[(j, i)] = -self.params[k];
                k += 1;
            }
        }
        m
    }

    /// Frobenius norm of the full matrix.
    pub fn norm(&self) -> f64 {
        (2.0 * self.params.iter().map(|p| p * p).sum::<f64>()).sqrt()
    }

    /// Frobenius inner product of the full matrices.
    pub fn dot(&self, other: &SkewMatrix) -> f64 {
        2.0 * self
            .params
            .iter()
            .zip(&other.params)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    pub fn scale(&self, factor: f64) -> SkewMatrix {
        SkewMatrix {
            dim: self.dim,
            params: self.params.iter().map(|p| p * factor).collect(),
        }
    }

    pub fn add(&self, other: &SkewMatrix) -> Result<SkewMatrix> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput("skew dimension mismatch".into()));
        }
        Ok(SkewMatrix {
            dim: self.dim,
            params: self
                .params
                .iter()
                .zip(&other.params)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

impl fmt::Debug for SkewMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewMatrix(dim={}, {:?})", self.dim, self.params)
    }
}
