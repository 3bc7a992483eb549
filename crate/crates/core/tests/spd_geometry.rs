mod common;

use std::f64::consts::E;

use common::*;
use liebn::matkernels::{SpdMatrix, SymMatrix};
use liebn::random::{random_spd, random_sym, rng_from_seed};
use liebn::spd::{ab_inner, SpdMetric, TangentVector};
use liebn::LieGroup;

fn families() -> Vec<SpdMetric> {
    vec![
        SpdMetric::aim(3, 1.0, 1.0, 0.0).unwrap(),
        SpdMetric::aim(3, -0.5, 1.0, 1.0 / 9.0).unwrap(),
        SpdMetric::lem(3, 1.0, 1.0 / 9.0).unwrap(),
        SpdMetric::lcm(3, 1.0).unwrap(),
        SpdMetric::lcm(3, 1.5).unwrap(),
    ]
}

#[test]
fn distances_match_oracle() {
    let (a, b) = (spd_rows(3, &A), spd_rows(3, &B));
    let o = &oracle()["dist"];
    let cases = [
        (SpdMetric::aim(3, 1.0, 1.0, 0.0), "aim"),
        (SpdMetric::aim(3, 0.5, 1.0, 0.1), "aim_theta0.5_beta0.1"),
        (SpdMetric::aim(3, -1.5, 1.0, 0.0), "aim_theta-1.5"),
        (SpdMetric::lem(3, 1.0, 0.0), "lem"),
        (SpdMetric::lem(3, 1.0, 1.0 / 9.0), "lem_beta1/9"),
        (SpdMetric::lem(3, 2.0, 0.5), "lem_alpha2_beta0.5"),
        (SpdMetric::lcm(3, 1.0), "lcm"),
        (SpdMetric::lcm(3, 0.5), "lcm_theta0.5"),
    ];
    for (metric, key) in cases {
        let d = metric.unwrap().geodesic_distance(&a, &b).unwrap();
        let want = o[key].as_f64().unwrap();
        assert!(rel_scalar(d, want) < 1e-12, "{key}: {d} vs {want}");
    }
}

#[test]
fn distance_examples() {
    let i2 = SpdMatrix::identity(2);
    let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
    let d = lem.geodesic_distance(&SpdMatrix::from_diagonal(&[E * E, 1.0]).unwrap(), &i2).unwrap();
    assert!((d - 2.0).abs() < 1e-14);

    // Commuting pair: sqrt(sum (ln λ)²) = sqrt(2) ln 4.
    let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
    let d = aim.geodesic_distance(&SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap(), &i2).unwrap();
    assert!((d - 2f64.sqrt() * 4f64.ln()).abs() < 1e-14);
    assert!((d - 1.960516).abs() < 1e-6);

    for m in families() {
        let p = spd_rows(3, &A);
        assert!(m.geodesic_distance(&p, &p).unwrap() < 1e-12);
    }
}

#[test]
fn inner_product_examples() {
    let i2 = SymMatrix::identity(2);
    assert_eq!(ab_inner(&i2, &i2, 1.0, 0.0).unwrap(), 2.0);
    assert_eq!(ab_inner(&i2, &i2, 1.0, 1.0).unwrap(), 6.0);
    let off = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    assert_eq!(ab_inner(&off, &i2, 1.0, 0.7).unwrap(), 0.0);

    let at = |m: SpdMetric, p: SpdMatrix, v: &[f64]| {
        let t = TangentVector::Sym(SymMatrix::from_diagonal(v));
        m.metric_inner_at(&p, &t, &t).unwrap()
    };
    let g = at(SpdMetric::lem(2, 1.0, 0.0).unwrap(), SpdMatrix::identity(2), &[1.0, 0.0]);
    assert!((g - 1.0).abs() < 1e-15);
    let g = at(SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap(), SpdMatrix::identity(2), &[1.0, 1.0]);
    assert!((g - 2.0).abs() < 1e-15);

    let lcm = SpdMetric::lcm(2, 1.0).unwrap();
    let x = TangentVector::Chol(liebn::matkernels::LowerTriMatrix::identity(2));
    let g = lcm
        .metric_inner_at(&SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap(), &x, &x)
        .unwrap();
    assert!((g - 0.5).abs() < 1e-15);
}

#[test]
fn group_operations_match_oracle() {
    let (a, b) = (spd_rows(3, &A), spd_rows(3, &B));
    let o = &oracle()["compose"];
    let cases = [
        (SpdMetric::aim(3, 1.0, 1.0, 0.0).unwrap(), "aim"),
        (SpdMetric::lem(3, 1.0, 0.0).unwrap(), "lem"),
        (SpdMetric::lcm(3, 1.0).unwrap(), "lcm"),
    ];
    for (m, key) in cases {
        let got = m.group_compose(&a, &b).unwrap();
        assert!(rel(got.as_matrix(), &matrix(&o[key])) < 1e-13, "{key}");
    }
}

#[test]
fn group_examples() {
    let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
    let got = lem
        .group_compose(&SpdMatrix::from_diagonal(&[3.0, 3.0]).unwrap(), &SpdMatrix::from_diagonal(&[2.0, 2.0]).unwrap())
        .unwrap();
    assert!(rel(got.as_matrix(), &diag(&[6.0, 6.0])) < 1e-14);

    let lcm = SpdMetric::lcm(2, 1.0).unwrap();
    let got = lcm
        .group_compose(&SpdMatrix::from_diagonal(&[9.0, 9.0]).unwrap(), &SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap())
        .unwrap();
    assert!(rel(got.as_matrix(), &diag(&[36.0, 36.0])) < 1e-14);

    let got = lem.group_inverse(&SpdMatrix::from_diagonal(&[E, 1.0]).unwrap()).unwrap();
    assert!(rel(got.as_matrix(), &diag(&[1.0 / E, 1.0])) < 1e-14);
    let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
    let got = aim.group_inverse(&SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap()).unwrap();
    assert!(rel(got.as_matrix(), &diag(&[0.25, 1.0 / 9.0])) < 1e-14);

    for m in families() {
        let p = spd_rows(3, &A);
        let e = m.identity();
        assert!(rel(m.group_compose(&e, &p).unwrap().as_matrix(), p.as_matrix()) < 1e-13);
        assert!(rel(m.group_inverse(&e).unwrap().as_matrix(), e.as_matrix()) < 1e-14);
    }
}

#[test]
fn log_and_exp() {
    let (a, b) = (spd_rows(3, &A), spd_rows(3, &B));
    let aim = SpdMetric::aim(3, 1.0, 1.0, 0.0).unwrap();
    let v = aim.log_at(&a, &b).unwrap();
    assert!(rel(v.as_matrix(), &matrix(&oracle()["aim_log_at"])) < 1e-13);

    let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
    let v = lem.log_at(&SpdMatrix::identity(2), &SpdMatrix::from_diagonal(&[E * E, 1.0]).unwrap()).unwrap();
    assert!((v.as_matrix() - diag(&[2.0, 0.0])).abs().max() < 1e-14);
    let aim2 = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
    let v = aim2.log_at(&SpdMatrix::identity(2), &SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap()).unwrap();
    assert!((v.as_matrix() - diag(&[4f64.ln(), 4f64.ln()])).abs().max() < 1e-14);
    let p = aim2.exp_at(&SpdMatrix::identity(2), &SymMatrix::identity(2)).unwrap();
    assert!(rel(p.as_matrix(), &diag(&[E, E])) < 1e-14);

    let mut rng = rng_from_seed(3);
    for m in families() {
        assert!(m.log_at(&a, &a).unwrap().norm() < 1e-12);
        assert!(rel(m.exp_at(&a, &SymMatrix::zeros(3)).unwrap().as_matrix(), a.as_matrix()) < 1e-13);
        for _ in 0..20 {
            let p = random_spd(&mut rng, 3, 0.8);
            let q = random_spd(&mut rng, 3, 0.8);
            let back = m.exp_at(&p, &m.log_at(&p, &q).unwrap()).unwrap();
            assert!(rel(back.as_matrix(), q.as_matrix()) < 1e-9);
        }
    }
}

#[test]
fn frechet_means_match_oracle() {
    let pts = [spd_rows(3, &A), spd_rows(3, &B), spd_rows(3, &C)];
    let o = &oracle()["mean"];
    let cases = [
        (SpdMetric::aim(3, 1.0, 1.0, 0.0).unwrap(), "aim", 1e-10),
        (SpdMetric::aim(3, 0.5, 1.0, 0.0).unwrap(), "aim_theta0.5", 1e-10),
        (SpdMetric::lem(3, 1.0, 0.0).unwrap(), "lem", 1e-13),
        (SpdMetric::lcm(3, 1.0).unwrap(), "lcm", 1e-13),
    ];
    for (m, key, tol) in cases {
        let mean = m.frechet_mean(&pts, Some(&W)).unwrap();
        let err = rel(mean.as_matrix(), &matrix(&o[key]));
        assert!(err < tol, "{key}: {err:e}");
    }
}

#[test]
fn frechet_mean_examples() {
    let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
    let pts = [
        SpdMatrix::from_diagonal(&[E * E, 1.0]).unwrap(),
        SpdMatrix::from_diagonal(&[1.0, E * E]).unwrap(),
    ];
    let mean = lem.frechet_mean(&pts, None).unwrap();
    assert!(rel(mean.as_matrix(), &diag(&[E, E])) < 1e-14);
    let var = lem.frechet_variance(&pts, &mean, None).unwrap();
    assert!((var - 2.0).abs() < 1e-13);

    let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
    let a = SpdMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
    let a_inv = aim.group_inverse(&a).unwrap();
    let mean = aim.frechet_mean(&[a.clone(), a_inv], None).unwrap();
    assert!((mean.as_matrix() - diag(&[1.0, 1.0])).abs().max() < 1e-10);

    for m in families() {
        let p = spd_rows(3, &A);
        let mean = m.frechet_mean(std::slice::from_ref(&p), None).unwrap();
        assert!(rel(mean.as_matrix(), p.as_matrix()) < 1e-14);
        let same = vec![p.clone(); 4];
        let mean = m.frechet_mean(&same, None).unwrap();
        assert!(m.frechet_variance(&same, &mean, None).unwrap() < 1e-20);
    }
}

#[test]
fn weighted_pair_examples() {
    let p1 = SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap();
    let p2 = SpdMatrix::identity(2);
    for m in [SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap(), SpdMetric::lem(2, 1.0, 0.0).unwrap()] {
        let mid = m.wfm_pair(&p1, &p2, 0.5).unwrap();
        assert!(rel(mid.as_matrix(), &diag(&[2.0, 2.0])) < 1e-14);
        assert!(rel(m.wfm_pair(&p1, &p2, 0.0).unwrap().as_matrix(), p2.as_matrix()) < 1e-14);
        assert!(rel(m.wfm_pair(&p1, &p2, 1.0).unwrap().as_matrix(), p1.as_matrix()) < 1e-14);
    }
}

#[test]
fn dilation_scales_dispersion() {
    let mut rng = rng_from_seed(5);
    for m in families() {
        let pts: Vec<_> = (0..8).map(|_| random_spd(&mut rng, 3, 0.5)).collect();
        let e = m.identity();
        let base = m.frechet_variance(&pts, &e, None).unwrap();
        for s in [0.5, 2.0, -1.0] {
            let scaled: Vec<_> = pts.iter().map(|p| m.dilate(p, s).unwrap()).collect();
            let v = m.frechet_variance(&scaled, &e, None).unwrap();
            assert!(rel_scalar(v, s * s * base) < 1e-9);
        }
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(SpdMetric::aim(3, 0.0, 1.0, 0.0).is_err());
    assert!(SpdMetric::aim(3, 1.0, 0.0, 0.0).is_err());
    assert!(SpdMetric::aim(3, 1.0, 1.0, -0.5).is_err());
    assert!(SpdMetric::lem(0, 1.0, 0.0).is_err());
    let m = SpdMetric::lem(3, 1.0, 0.0).unwrap();
    let mut rng = rng_from_seed(1);
    let wrong = random_spd(&mut rng, 2, 0.5);
    assert!(m.geodesic_distance(&wrong, &m.identity()).is_err());
    let s = random_sym(&mut rng, 3, 1.0);
    assert!(m.frechet_mean(&[m.identity(), m.exp_identity(&s).unwrap()], Some(&[0.7, 0.7])).is_err());
}
