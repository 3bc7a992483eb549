//! General (non-symmetric) matrix exponential and logarithm.
//!
//! Used for skew-symmetric generators and rotations, where the symmetric
//! eigensolver does not apply.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const TAYLOR_TERMS: usize = 30;

/// Scaling-and-squaring with a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=TAYLOR_TERMS {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.norm() <= 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DomainError("singular iterate in matrix square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DomainError("singular iterate in matrix square root".into()))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let step = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if step <= 1e-15 * y.norm() {
            return Ok(y);
        }
    }
    Err(Error::ConvergenceError {
        iterations: 100,
        residual: (&y * &y - a).norm(),
        last_iterate: y.transpose().iter().copied().collect(),
    })
}

/// Principal logarithm by inverse scaling-and-squaring: repeated square
/// roots until the matrix is close to the identity, then the series
/// `log A = 2 Σ C^(2j+1) / (2j+1)` with `C = (A − I)(A + I)⁻¹`.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut m = a.clone();
    let mut roots = 0;
    while (&m - &eye).norm() > 0.25 {
        if roots == 60 {
            return Err(Error::DomainError(
                "matrix logarithm: square roots did not approach the identity".into(),
            ));
        }
        m = sqrtm(&m)?;
        roots += 1;
    }
    let denom = (&m + &eye)
        .try_inverse()
        .ok_or_else(|| Error::DomainError("matrix logarithm: A + I is singular".into()))?;
    let c = (&m - &eye) * denom;
    let c2 = &c * &c;
    let mut power = c.clone();
    let mut sum = c.clone();
    for j in 1..200 {
        power = &power * &c2;
        let term = &power / (2 * j + 1) as f64;
        sum += &term;
        if term.norm() <= 1e-20 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum * (2.0 * 2f64.powi(roots)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_planar_generator_is_rotation() {
        let t = 0.7;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let r = expm(&a);
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((r - expected).norm() < 1e-14);
    }

    #[test]
    fn exp_handles_large_norm() {
        let t = 3.0;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let r = expm(&a);
        let expected = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((r - expected).norm() < 1e-13);
    }

    #[test]
    fn log_inverts_exp_for_rotation_generators() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, -1.1, 0.4, 1.1, 0.0, -2.0, -0.4, 2.0, 0.0],
        );
        let l = logm(&expm(&a)).unwrap();
        assert!((l - a).norm() < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let r = sqrtm(&a).unwrap();
        assert!((r - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).norm() < 1e-14);
    }
}
