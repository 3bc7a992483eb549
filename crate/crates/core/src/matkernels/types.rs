use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest asymmetry accepted (relative to the largest entry) before a
/// matrix is rejected instead of symmetrized.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-8;

fn check_square_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::InvalidInput(format!(
            "{what} must be a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Symmetrized copy of `m`, rejecting inputs that are far from symmetric.
fn checked_symmetrize(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    check_square_finite(m, what)?;
    let scale = m.amax().max(1.0);
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (m[(i, j)] - m[(j, i)]).abs();
            if gap > ASYMMETRY_TOLERANCE * scale {
                return Err(Error::InvalidInput(format!(
                    "{what} is not symmetric: |a[{i},{j}] - a[{j},{i}]| = {gap:e}"
                )));
            }
        }
    }
    Ok(symmetrize(m))
}

/// Dense real symmetric matrix.
#[derive(Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        checked_symmetrize(&m, "symmetric matrix").map(SymMatrix)
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Symmetrizes without the asymmetry check. For results of kernels that
    /// are symmetric in exact arithmetic.
    pub(crate) fn from_symmetrized(m: DMatrix<f64>) -> Self {
        SymMatrix(symmetrize(&m))
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix(DMatrix::from_diagonal(&DVector::from_row_slice(diag)))
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

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, factor: f64) -> SymMatrix {
        SymMatrix(&self.0 * factor)
    }

    pub fn diagonal_part(&self) -> SymMatrix {
        SymMatrix(DMatrix::from_diagonal(&self.0.diagonal()))
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{}", self.0)
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, rhs: f64) -> SymMatrix {
        self.scale(rhs)
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix(-&self.0)
    }
}

/// Dense symmetric positive-definite matrix.
#[derive(Clone, PartialEq)]
pub struct SpdMatrix(DMatrix<f64>);

impl SpdMatrix {
    /// Symmetrizes and checks positive definiteness with a Cholesky attempt.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let sym = checked_symmetrize(&m, "SPD matrix")?;
        if super::cholesky::cholesky_factor(&sym).is_none() {
            return Err(Error::DomainError(
                "matrix is not positive definite".to_string(),
            ));
        }
        Ok(SpdMatrix(sym))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Symmetrizes without checking definiteness. For kernel outputs that are
    /// SPD by construction (spectral maps with positive image, `L Lᵀ`, congruences).
    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        SpdMatrix(symmetrize(&m))
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() || diag.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::DomainError(
                "diagonal entries must be finite and positive".to_string(),
            ));
        }
        Ok(SpdMatrix(DMatrix::from_diagonal(&DVector::from_row_slice(
            diag,
        ))))
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

    pub fn as_sym(&self) -> SymMatrix {
        SymMatrix(self.0.clone())
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }

    /// `‖self − other‖_F / max(‖other‖_F, tiny)`.
    pub fn relative_distance(&self, other: &SpdMatrix) -> f64 {
        (&self.0 - &other.0).norm() / other.0.norm().max(f64::MIN_POSITIVE)
    }
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpdMatrix{}", self.0)
    }
}

/// Dense lower-triangular matrix; entries above the diagonal are exactly zero.
#[derive(Clone, PartialEq)]
pub struct LowerTriMatrix(DMatrix<f64>);

impl LowerTriMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&m, "lower-triangular matrix")?;
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if m[(i, j)] != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "entry [{i},{j}] above the diagonal is {}",
                        m[(i, j)]
                    )));
                }
            }
        }
        Ok(LowerTriMatrix(m))
    }

    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// Keeps the lower triangle of `m`, zeroing the rest.
    pub(crate) fn lower_of(m: &DMatrix<f64>) -> Self {
        LowerTriMatrix(m.lower_triangle())
    }

    pub fn zeros(n: usize) -> Self {
        LowerTriMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        LowerTriMatrix(DMatrix::identity(n, n))
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

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, factor: f64) -> LowerTriMatrix {
        LowerTriMatrix(&self.0 * factor)
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }
}

impl fmt::Debug for LowerTriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LowerTriMatrix{}", self.0)
    }
}

impl Add for &LowerTriMatrix {
    type Output = LowerTriMatrix;
    fn add(self, rhs: &LowerTriMatrix) -> LowerTriMatrix {
        LowerTriMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &LowerTriMatrix {
    type Output = LowerTriMatrix;
    fn sub(self, rhs: &LowerTriMatrix) -> LowerTriMatrix {
        LowerTriMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &LowerTriMatrix {
    type Output = LowerTriMatrix;
    fn neg(self) -> LowerTriMatrix {
        LowerTriMatrix(-&self.0)
    }
}

/// Eigenvectors (columns of `vectors`) and eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigPair {
    pub vectors: DMatrix<f64>,
    pub values: DVector<f64>,
}

impl EigPair {
    /// `U · diag(f(σ)) · Uᵀ`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= f(self.values[j]);
        }
        scaled * self.vectors.transpose()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.reconstruct_with(|x| x)
    }

    pub fn min_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrizes_small_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0 + 1e-12, 2.0, 3.0]);
        let s = SymMatrix::new(m).unwrap();
        assert_eq!(s.as_matrix()[(0, 1)], s.as_matrix()[(1, 0)]);
    }

    #[test]
    fn rejects_large_asymmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 3.0]);
        assert!(matches!(SymMatrix::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, f64::NAN, 3.0]);
        assert!(matches!(SymMatrix::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(SpdMatrix::new(m), Err(Error::DomainError(_))));
    }

    #[test]
    fn lower_tri_rejects_upper_entries() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1e-300, 0.0, 1.0]);
        assert!(LowerTriMatrix::new(m).is_err());
    }
}
