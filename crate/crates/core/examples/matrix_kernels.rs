//! Spectral kernels: eigendecomposition, matrix functions and their gradients.

use liebn::matkernels::{mexp, mlog, spd_fun_vjp, sym_eigendecompose, ScalarFn, SpdMatrix, SymMatrix};

fn main() -> liebn::Result<()> {
    let p = SpdMatrix::from_row_slice(3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0])?;
    let eig = sym_eigendecompose(&p.as_sym())?;
    println!("eigenvalues {:?}", eig.values.as_slice());

    let round_trip = mexp(&mlog(&p));
    println!("exp(log P) error {:.2e}", (round_trip.as_matrix() - p.as_matrix()).norm());

    // Gradient of tr(G log P) against a finite difference.
    let g = SymMatrix::from_row_slice(3, &[1.0, 0.2, 0.0, 0.2, -1.0, 0.3, 0.0, 0.3, 0.5])?;
    let grad = spd_fun_vjp(&p, ScalarFn::Log, &g)?;
    let dir = SymMatrix::from_diagonal(&[0.0, 1.0, 0.0]);
    let h = 1e-6;
    let f = |q: &SpdMatrix| mlog(q).frobenius_dot(&g);
    let shifted = SpdMatrix::new(p.as_matrix() + dir.as_matrix() * h)?;
    let fd = (f(&shifted) - f(&p)) / h;
    println!("directional derivative: analytic {:.6}, finite difference {fd:.6}", grad.frobenius_dot(&dir));
    Ok(())
}
