//! Dense symmetric-matrix primitives: spectral functions and their
//! Daleckii–Krein derivatives, Cholesky machinery and the `clog` chart.

mod cholesky;
mod eigen;
mod expm;
mod spectral;
mod types;

pub use cholesky::{
    chol_inv, chol_inv_differential, chol_inv_differential_inverse, cholesky, clog, clog_inv,
    clog_inv_factor, tril_parts, PIVOT_TOLERANCE,
};
pub(crate) use cholesky::lower_inverse;
pub use eigen::sym_eigendecompose;
pub use expm::{expm, logm, sqrtm};
pub use spectral::{
    eig_closeness_threshold, mexp, mlog, mpow, spd_fun, spd_fun_vjp, ScalarFn, Spectral,
};
pub use types::{EigPair, LowerTriMatrix, SpdMatrix, SymMatrix, ASYMMETRY_TOLERANCE};
