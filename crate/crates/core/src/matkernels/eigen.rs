//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Sweeps visit the pairs `(p, q)` with `p < q` in row order, so the output
//! is a deterministic function of the input. Eigenvalues come back sorted in
//! descending order and each eigenvector has its first non-negligible
//! component positive.

use nalgebra::{DMatrix, DVector};

use super::types::{EigPair, SymMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

pub fn sym_eigendecompose(s: &SymMatrix) -> Result<EigPair> {
    let m = s.as_matrix();
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(
            "eigendecomposition of a matrix with non-finite entries".to_string(),
        ));
    }
    Ok(jacobi(m))
}

pub(crate) fn jacobi(input: &DMatrix<f64>) -> EigPair {
    let n = input.nrows();
    let mut a = input.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off == 0.0 || off.sqrt() <= 1e-18 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the original column order among exact ties.
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));

    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).clone_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        vectors.set_column(dst, &col);
    }
    EigPair { vectors, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, e: &[f64]) -> SymMatrix {
        SymMatrix::from_row_slice(n, e).unwrap()
    }

    #[test]
    fn identity_is_trivial() {
        let eig = sym_eigendecompose(&SymMatrix::identity(2)).unwrap();
        assert_eq!(eig.values.as_slice(), &[1.0, 1.0]);
        assert_eq!(eig.vectors, DMatrix::identity(2, 2));
    }

    #[test]
    fn diagonal_sorted_descending() {
        let eig = sym_eigendecompose(&SymMatrix::from_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(eig.values.as_slice(), &[3.0, 1.0]);
        assert_eq!(eig.vectors, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn two_by_two_matches_characteristic_polynomial() {
        // [[2,1],[1,2]]: λ² − 4λ + 3 = 0 → λ ∈ {3, 1}.
        let eig = sym_eigendecompose(&sym(2, &[2.0, 1.0, 1.0, 2.0])).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = DMatrix::from_row_slice(2, 2, &[r, r, r, -r]);
        assert!((&eig.vectors - expected).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let m = SymMatrix::from_symmetrized(DMatrix::from_element(2, 2, f64::INFINITY));
        assert!(sym_eigendecompose(&m).is_err());
    }

    #[test]
    fn reconstructs_and_is_orthogonal() {
        let s = sym(
            4,
            &[
                4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, 1.0, -2.0, 0.0, 5.0, 0.3, 0.5, 1.0, 0.3, 2.0,
            ],
        );
        let eig = sym_eigendecompose(&s).unwrap();
        let n = 4;
        let ortho = eig.vectors.transpose() * &eig.vectors - DMatrix::<f64>::identity(n, n);
        assert!(ortho.norm() < 1e-13);
        let rel = (eig.reconstruct() - s.as_matrix()).norm() / s.norm();
        assert!(rel < 1e-13);
        for w in eig.values.as_slice().windows(2) {
            assert!(w[0] >= w[1]);
        }
    }
}
