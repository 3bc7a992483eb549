mod common;

use std::f64::consts::{E, LN_2};

use common::*;
use liebn::matkernels::*;
use liebn::random::{random_spd, random_sym, rng_from_seed};
use nalgebra::DMatrix;

#[test]
fn eigendecomposition_examples() {
    let eig = sym_eigendecompose(&SymMatrix::from_row_slice(2, &[2.0, 1.0, 1.0, 2.0]).unwrap()).unwrap();
    assert!((eig.values[0] - 3.0).abs() < 1e-14 && (eig.values[1] - 1.0).abs() < 1e-14);
    let u0 = eig.vectors.column(0);
    assert!((u0[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    assert!((u0[0] - u0[1]).abs() < 1e-14);

    let eig = sym_eigendecompose(&SymMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
    assert_eq!(eig.values.as_slice(), &[3.0, 1.0]);
    assert!((eig.vectors.clone() - DMatrix::identity(2, 2)).abs().max() < 1e-15);
}

#[test]
fn eigenvalues_match_oracle() {
    let eig = sym_eigendecompose(&SymMatrix::from_row_slice(3, &A).unwrap()).unwrap();
    let expected: Vec<f64> = serde_json::from_value(oracle()["eigenvalues"].clone()).unwrap();
    for (got, want) in eig.values.iter().zip(&expected) {
        assert!(rel_scalar(*got, *want) < 1e-14, "{got} vs {want}");
    }
    assert!(rel(&eig.reconstruct(), &DMatrix::from_row_slice(3, 3, &A)) < 1e-14);
    let gram = eig.vectors.transpose() * &eig.vectors;
    assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-14);
}

#[test]
fn spectral_functions_match_oracle() {
    let a = spd_rows(3, &A);
    let s = SymMatrix::from_row_slice(3, &S).unwrap();
    let o = oracle();
    assert!(rel(mexp(&s).as_matrix(), &matrix(&o["mexp_s"])) < 1e-13);
    assert!(rel(mlog(&a).as_matrix(), &matrix(&o["mlog_a"])) < 1e-13);
    assert!(rel(mpow(&a, 0.5).as_matrix(), &matrix(&o["pow_a_half"])) < 1e-13);
    assert!(rel(mpow(&a, -1.5).as_matrix(), &matrix(&o["pow_a_m1_5"])) < 1e-13);
    assert!(rel(clog(&a).unwrap().as_matrix(), &matrix(&o["clog_a"])) < 1e-13);
}

#[test]
fn spectral_function_examples() {
    assert_eq!(mexp(&SymMatrix::zeros(3)).as_matrix(), &DMatrix::identity(3, 3));
    let l = mlog(&SpdMatrix::from_diagonal(&[E * E, 1.0]).unwrap());
    assert!((l.as_matrix() - diag(&[2.0, 0.0])).abs().max() < 1e-15);
    let r = mpow(&SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap(), 0.5);
    assert!((r.as_matrix() - diag(&[2.0, 3.0])).abs().max() < 1e-15);
}

#[test]
fn cholesky_and_clog_examples() {
    let p = spd_rows(2, &[4.0, 2.0, 2.0, 5.0]);
    let l = cholesky(&p).unwrap();
    assert_eq!(l.as_matrix(), &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 1.0, 2.0]));

    let (strict, d) = tril_parts(&l);
    assert_eq!(strict.as_matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));
    assert_eq!(d.as_matrix(), &diag(&[2.0, 2.0]));

    let x = clog(&p).unwrap();
    let expected = DMatrix::from_row_slice(2, 2, &[LN_2, 0.0, 1.0, LN_2]);
    assert!((x.as_matrix() - &expected).abs().max() < 1e-15);
    assert!(rel(clog_inv(&x).unwrap().as_matrix(), p.as_matrix()) < 1e-15);

    assert_eq!(clog(&SpdMatrix::identity(3)).unwrap().as_matrix(), &DMatrix::zeros(3, 3));
    let y = clog(&SpdMatrix::from_diagonal(&[E * E, E * E]).unwrap()).unwrap();
    assert!((y.as_matrix() - DMatrix::identity(2, 2)).abs().max() < 1e-15);
}

#[test]
fn vjp_examples() {
    let g = SymMatrix::from_row_slice(2, &[0.3, -1.2, -1.2, 2.0]).unwrap();
    let out = spd_fun_vjp(&SpdMatrix::identity(2), ScalarFn::Log, &g).unwrap();
    assert!((out.as_matrix() - g.as_matrix()).abs().max() < 1e-15);

    let out = spd_fun_vjp(&SpdMatrix::from_diagonal(&[E, 1.0]).unwrap(), ScalarFn::Log, &SymMatrix::identity(2))
        .unwrap();
    let expected = diag(&[1.0 / E, 1.0]);
    assert!((out.as_matrix() - expected).abs().max() < 1e-15);
}

#[test]
fn vjp_matches_high_precision_differences() {
    let a = spd_rows(3, &A);
    let g = SymMatrix::from_row_slice(3, &G).unwrap();
    let o = &oracle()["vjp"];
    for (f, key) in [
        (ScalarFn::Exp, "exp"),
        (ScalarFn::Log, "log"),
        (ScalarFn::Pow(0.5), "pow_0.5"),
        (ScalarFn::Pow(-1.5), "pow_-1.5"),
    ] {
        let got = spd_fun_vjp(&a, f, &g).unwrap();
        let err = rel(got.as_matrix(), &matrix(&o[key]));
        assert!(err < 1e-12, "{key}: {err:e}");
    }
}

#[test]
fn round_trips_on_random_matrices() {
    let mut rng = rng_from_seed(11);
    for n in [2, 3, 5, 8] {
        for _ in 0..50 {
            let p = random_spd(&mut rng, n, 1.0);
            assert!(rel(mexp(&mlog(&p)).as_matrix(), p.as_matrix()) < 1e-10);
            assert!(rel(clog_inv(&clog(&p).unwrap()).unwrap().as_matrix(), p.as_matrix()) < 1e-10);
            assert!(rel(mpow(&mpow(&p, 0.5), 2.0).as_matrix(), p.as_matrix()) < 1e-10);
            let s = random_sym(&mut rng, n, 1.0);
            assert!(rel(mlog(&mexp(&s)).as_matrix(), s.as_matrix()) < 1e-10);
        }
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(SymMatrix::from_row_slice(2, &[1.0, 2.0, 0.0, 1.0]).is_err());
    assert!(SpdMatrix::from_row_slice(2, &[1.0, 2.0, 2.0, 1.0]).is_err());
    assert!(SpdMatrix::from_diagonal(&[1.0, f64::NAN]).is_err());
    assert!(SpdMatrix::from_diagonal(&[1.0, 0.0]).is_err());
}
