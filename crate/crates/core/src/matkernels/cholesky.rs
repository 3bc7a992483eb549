use nalgebra::DMatrix;

use super::types::{LowerTriMatrix, SpdMatrix, SymMatrix};
use crate::error::{Error, Result};

/// Pivots at or below this fraction of the largest diagonal entry are
/// treated as a loss of positive definiteness.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Plain Cholesky–Banachiewicz factorization, `None` on a non-positive pivot.
pub(crate) fn cholesky_factor(p: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = p.nrows();
    let scale = (0..n)
        .map(|i| p[(i, i)].abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = p[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(sum > PIVOT_TOLERANCE * scale) {
                    return None;
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Lower Cholesky factor `L` with `L Lᵀ = P` and positive diagonal.
pub fn cholesky(p: &SpdMatrix) -> Result<LowerTriMatrix> {
    cholesky_factor(p.as_matrix())
        .map(|l| LowerTriMatrix::lower_of(&l))
        .ok_or_else(|| Error::DomainError("non-positive pivot in Cholesky factorization".into()))
}

/// Splits `L` into its strictly lower part and its diagonal part.
pub fn tril_parts(l: &LowerTriMatrix) -> (LowerTriMatrix, LowerTriMatrix) {
    let m = l.as_matrix();
    let diag = DMatrix::from_diagonal(&m.diagonal());
    let strict = m - &diag;
    (LowerTriMatrix::lower_of(&strict), LowerTriMatrix::lower_of(&diag))
}

/// `⌊L⌋ + Dlog(L)` where `L = chol(P)`.
pub fn clog(p: &SpdMatrix) -> Result<LowerTriMatrix> {
    let l = cholesky(p)?;
    let mut m = l.into_matrix();
    for i in 0..m.nrows() {
        m[(i, i)] = m[(i, i)].ln();
    }
    Ok(LowerTriMatrix::lower_of(&m))
}

/// Cholesky factor `⌊X⌋ + Dexp(X)` of `clog⁻¹(X)`.
pub fn clog_inv_factor(x: &LowerTriMatrix) -> Result<LowerTriMatrix> {
    let mut m = x.as_matrix().clone();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("clog_inv of non-finite matrix".into()));
    }
    for i in 0..m.nrows() {
        m[(i, i)] = m[(i, i)].exp();
    }
    Ok(LowerTriMatrix::lower_of(&m))
}

/// Inverse of [`clog`]: `L Lᵀ` with `L = ⌊X⌋ + Dexp(X)`.
pub fn clog_inv(x: &LowerTriMatrix) -> Result<SpdMatrix> {
    let l = clog_inv_factor(x)?;
    Ok(chol_inv(&l))
}

/// `L Lᵀ`.
pub fn chol_inv(l: &LowerTriMatrix) -> SpdMatrix {
    let m = l.as_matrix();
    SpdMatrix::from_trusted(m * m.transpose())
}

/// Differential of `L ↦ L Lᵀ` at `L`: `X ↦ X Lᵀ + L Xᵀ`.
pub fn chol_inv_differential(l: &LowerTriMatrix, x: &LowerTriMatrix) -> SymMatrix {
    let xl = x.as_matrix() * l.as_matrix().transpose();
    SymMatrix::from_symmetrized(&xl + xl.transpose())
}

/// Inverse of [`chol_inv_differential`]: `X = L (L⁻¹ W L⁻ᵀ)_½`, where `(·)_½`
/// keeps the strictly lower part and halves the diagonal.
pub fn chol_inv_differential_inverse(l: &LowerTriMatrix, w: &SymMatrix) -> LowerTriMatrix {
    let lm = l.as_matrix();
    let linv_w = lm
        .solve_lower_triangular(w.as_matrix())
        .expect("Cholesky factor has a positive diagonal");
    let y = lm
        .solve_lower_triangular(&linv_w.transpose())
        .expect("Cholesky factor has a positive diagonal");
    let mut half = y.lower_triangle();
    for i in 0..half.nrows() {
        half[(i, i)] *= 0.5;
    }
    LowerTriMatrix::lower_of(&(lm * half))
}

/// Inverse of a lower-triangular matrix with non-zero diagonal.
pub(crate) fn lower_inverse(l: &LowerTriMatrix) -> DMatrix<f64> {
    let n = l.dim();
    l.as_matrix()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .expect("Cholesky factor has a positive diagonal")
}
