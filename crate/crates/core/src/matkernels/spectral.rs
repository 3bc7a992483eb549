//! Spectral matrix functions `U f(Σ) Uᵀ` and their Fréchet derivatives via
//! the Daleckii–Krein divided-difference kernel.

use nalgebra::DMatrix;

use super::eigen::jacobi;
use super::types::{EigPair, SpdMatrix, SymMatrix};
use crate::error::{Error, Result};

/// Scalar function applied to the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarFn {
    Exp,
    Log,
    Pow(f64),
}

impl ScalarFn {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ScalarFn::Exp => x.exp(),
            ScalarFn::Log => x.ln(),
            ScalarFn::Pow(p) => pow_scalar(x, p),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ScalarFn::Exp => x.exp(),
            ScalarFn::Log => 1.0 / x,
            ScalarFn::Pow(p) => {
                if p == 0.0 {
                    0.0
                } else {
                    p * pow_scalar(x, p - 1.0)
                }
            }
        }
    }

    /// Whether the function is only defined on a positive spectrum.
    pub fn needs_positive_spectrum(self) -> bool {
        match self {
            ScalarFn::Exp => false,
            ScalarFn::Log => true,
            ScalarFn::Pow(p) => p.fract() != 0.0,
        }
    }
}

fn pow_scalar(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Eigenvalue gap below which the divided difference switches to `f′`.
pub fn eig_closeness_threshold(sigma: f64) -> f64 {
    1e-10 * sigma.abs().max(1.0)
}

/// Cached eigendecomposition of a symmetric matrix, with the spectral map
/// and its derivative available for any [`ScalarFn`].
#[derive(Clone, Debug)]
pub struct Spectral {
    eig: EigPair,
}

impl Spectral {
    pub fn of_sym(s: &SymMatrix) -> Result<Self> {
        Ok(Spectral {
            eig: super::eigen::sym_eigendecompose(s)?,
        })
    }

    pub fn of_spd(p: &SpdMatrix) -> Self {
        Spectral {
            eig: jacobi(p.as_matrix()),
        }
    }

    pub fn eig(&self) -> &EigPair {
        &self.eig
    }

    fn check_domain(&self, f: ScalarFn) -> Result<()> {
        let min = self.eig.min_value();
        if f.needs_positive_spectrum() && min <= 0.0 {
            return Err(Error::DomainError(format!(
                "{f:?} needs a positive spectrum, smallest eigenvalue is {min:e}"
            )));
        }
        if let ScalarFn::Pow(p) = f {
            if p < 0.0 && self.eig.values.iter().any(|&x| x == 0.0) {
                return Err(Error::DomainError(format!(
                    "negative power {p} of a singular matrix"
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, f: ScalarFn) -> Result<DMatrix<f64>> {
        self.check_domain(f)?;
        Ok(self.eig.reconstruct_with(|x| f.eval(x)))
    }

    /// Daleckii–Krein matrix `K_ij = (f(σᵢ) − f(σⱼ)) / (σᵢ − σⱼ)`, with `f′(σᵢ)`
    /// when the eigenvalues are closer than [`eig_closeness_threshold`].
    pub fn dk_kernel(&self, f: ScalarFn) -> Result<DMatrix<f64>> {
        self.check_domain(f)?;
        let sigma = &self.eig.values;
        let n = sigma.len();
        let fs: Vec<f64> = sigma.iter().map(|&x| f.eval(x)).collect();
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let gap = sigma[i] - sigma[j];
            if gap.abs() > eig_closeness_threshold(sigma[i]) {
                (fs[i] - fs[j]) / gap
            } else {
                f.derivative(sigma[i])
            }
        }))
    }

    /// `U [K ⊙ (Uᵀ G U)] Uᵀ`. The operator is self-adjoint, so this is both the
    /// vector-Jacobian product and the directional derivative `Df(S)[G]`.
    pub fn differential(&self, f: ScalarFn, g: &SymMatrix) -> Result<SymMatrix> {
        let k = self.dk_kernel(f)?;
        let u = &self.eig.vectors;
        let inner = u.transpose() * g.as_matrix() * u;
        let weighted = inner.component_mul(&k);
        Ok(SymMatrix::from_symmetrized(u * weighted * u.transpose()))
    }

    /// Inverse of [`Spectral::differential`]: `U [(Uᵀ V U) ⊘ K] Uᵀ`.
    pub fn differential_inverse(&self, f: ScalarFn, v: &SymMatrix) -> Result<SymMatrix> {
        let k = self.dk_kernel(f)?;
        if k.iter().any(|x| *x == 0.0 || !x.is_finite()) {
            return Err(Error::DomainError(format!(
                "differential of {f:?} is not invertible at this point"
            )));
        }
        let u = &self.eig.vectors;
        let inner = u.transpose() * v.as_matrix() * u;
        let weighted = inner.component_div(&k);
        Ok(SymMatrix::from_symmetrized(u * weighted * u.transpose()))
    }
}

/// `U f(Σ) Uᵀ` for a symmetric input.
pub fn spd_fun(s: &SymMatrix, f: ScalarFn) -> Result<SymMatrix> {
    let spec = Spectral::of_sym(s)?;
    spec.apply(f).map(SymMatrix::from_symmetrized)
}

/// Reverse-mode gradient of `tr(upstreamᵀ f(S))` with respect to `S`.
pub fn spd_fun_vjp(s: &SpdMatrix, f: ScalarFn, upstream: &SymMatrix) -> Result<SymMatrix> {
    if s.dim() != upstream.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            s.dim(),
            upstream.dim()
        )));
    }
    Spectral::of_spd(s).differential(f, upstream)
}

/// Matrix exponential of a symmetric matrix; always SPD.
pub fn mexp(s: &SymMatrix) -> SpdMatrix {
    let spec = Spectral::of_sym(s).expect("SymMatrix entries are finite");
    SpdMatrix::from_trusted(spec.eig.reconstruct_with(f64::exp))
}

/// Principal matrix logarithm of an SPD matrix.
pub fn mlog(p: &SpdMatrix) -> SymMatrix {
    SymMatrix::from_symmetrized(Spectral::of_spd(p).eig.reconstruct_with(f64::ln))
}

/// `P^θ` for an SPD matrix; returns the input unchanged for `θ = 1`.
pub fn mpow(p: &SpdMatrix, theta: f64) -> SpdMatrix {
    if theta == 1.0 {
        return p.clone();
    }
    SpdMatrix::from_trusted(
        Spectral::of_spd(p)
            .eig
            .reconstruct_with(|x| pow_scalar(x, theta)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = mexp(&SymMatrix::zeros(3));
        assert!((e.as_matrix() - DMatrix::<f64>::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn log_of_diagonal() {
        let p = SpdMatrix::from_diagonal(&[E * E, 1.0]).unwrap();
        let l = mlog(&p);
        assert!((l.as_matrix() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn square_root_of_diagonal() {
        let s = SymMatrix::from_diagonal(&[4.0, 9.0]);
        let r = spd_fun(&s, ScalarFn::Pow(0.5)).unwrap();
        assert!((r.as_matrix() - DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).norm() < 1e-15);
    }

    #[test]
    fn log_of_indefinite_is_domain_error() {
        let s = SymMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(spd_fun(&s, ScalarFn::Log), Err(Error::DomainError(_))));
        assert!(matches!(
            spd_fun(&s, ScalarFn::Pow(0.5)),
            Err(Error::DomainError(_))
        ));
        // Integer powers are defined on any symmetric matrix.
        assert!(spd_fun(&s, ScalarFn::Pow(2.0)).is_ok());
    }

    #[test]
    fn vjp_degenerate_spectrum_is_identity_scaling() {
        let g = SymMatrix::from_row_slice(2, &[0.3, -1.2, -1.2, 2.0]).unwrap();
        let out = spd_fun_vjp(&SpdMatrix::identity(2), ScalarFn::Log, &g).unwrap();
        assert!((out.as_matrix() - g.as_matrix()).norm() < 1e-15);
    }

    #[test]
    fn vjp_diagonal_log() {
        let p = SpdMatrix::from_diagonal(&[E, 1.0]).unwrap();
        let out = spd_fun_vjp(&p, ScalarFn::Log, &SymMatrix::identity(2)).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0 / E, 0.0, 0.0, 1.0]);
        assert!((out.as_matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn differential_inverse_round_trip() {
        let p = SpdMatrix::from_row_slice(3, &[3.0, 0.5, 0.1, 0.5, 2.0, -0.3, 0.1, -0.3, 1.0]).unwrap();
        let v = SymMatrix::from_row_slice(3, &[1.0, 2.0, 0.0, 2.0, -1.0, 0.5, 0.0, 0.5, 0.2]).unwrap();
        let spec = Spectral::of_spd(&p);
        for f in [ScalarFn::Log, ScalarFn::Exp, ScalarFn::Pow(-1.5)] {
            let d = spec.differential(f, &v).unwrap();
            let back = spec.differential_inverse(f, &d).unwrap();
            assert!((back.as_matrix() - v.as_matrix()).norm() < 1e-12, "{f:?}");
        }
    }

    #[test]
    fn mpow_one_is_identity_map() {
        let p = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        assert_eq!(mpow(&p, 1.0), p);
    }
}
