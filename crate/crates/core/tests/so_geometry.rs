mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use common::*;
use liebn::random::{random_rotation, random_skew, rng_from_seed};
use liebn::so::*;
use nalgebra::DMatrix;

fn rot(v: &serde_json::Value) -> RotationMatrix {
    RotationMatrix::new(matrix(v)).unwrap()
}

fn rz(angle: f64) -> RotationMatrix {
    RotationMatrix::axis_angle([0.0, 0.0, 1.0], angle).unwrap()
}

#[test]
fn so3_matches_oracle() {
    let o = &oracle()["so3"];
    let (r, s, t) = (rot(&o["r"]), rot(&o["s"]), rot(&o["t"]));
    let v = so_log(&r, &s).unwrap();
    assert!(rel(&v.to_matrix(), &matrix(&o["log"])) < 1e-13);
    assert!(rel_scalar(so_distance(&r, &s).unwrap(), o["dist"].as_f64().unwrap()) < 1e-13);
    let mean = so_frechet_mean(&[r, s, t], Some(&W)).unwrap();
    assert!((mean.as_matrix() - matrix(&o["mean"])).abs().max() < 1e-10);
}

#[test]
fn so4_matches_oracle() {
    let o = &oracle()["so4"];
    let (r, s) = (rot(&o["r"]), rot(&o["s"]));
    let v = so_log(&r, &s).unwrap();
    assert!(rel(&v.to_matrix(), &matrix(&o["log"])) < 1e-12);
    assert!(rel_scalar(so_distance(&r, &s).unwrap(), o["dist"].as_f64().unwrap()) < 1e-12);
    let mid = so_geodesic(&r, &s, 0.5).unwrap();
    assert!((mid.as_matrix() - matrix(&o["midpoint"])).abs().max() < 1e-12);
}

#[test]
fn log_and_exp_examples() {
    let i3 = RotationMatrix::identity(3);
    assert!(so_log(&i3, &i3).unwrap().norm() < 1e-15);
    let v = so_log(&i3, &rz(FRAC_PI_2)).unwrap();
    let expected = SkewMatrix::from_axis([0.0, 0.0, FRAC_PI_2]).to_matrix();
    assert!((v.to_matrix() - expected).abs().max() < 1e-14);

    let i2 = RotationMatrix::identity(2);
    let v = so_log(&i2, &RotationMatrix::planar(0.3)).unwrap();
    let expected = DMatrix::from_row_slice(2, 2, &[0.0, -0.3, 0.3, 0.0]);
    assert!((v.to_matrix() - expected).abs().max() < 1e-15);

    let half_turn = so_exp(&i3, &SkewMatrix::from_axis([0.0, 0.0, PI])).unwrap();
    assert!((half_turn.as_matrix() - diag(&[-1.0, -1.0, 1.0])).abs().max() < 1e-15);

    let r = rz(0.4);
    assert_eq!(so_exp(&r, &SkewMatrix::zeros(3)).unwrap().as_matrix(), r.as_matrix());
}

#[test]
fn distance_and_geodesic_examples() {
    let i3 = RotationMatrix::identity(3);
    let d = so_distance(&i3, &rz(FRAC_PI_2)).unwrap();
    assert!((d - FRAC_PI_2 * 2f64.sqrt()).abs() < 1e-14);
    let mid = so_geodesic(&i3, &rz(FRAC_PI_2), 0.5).unwrap();
    assert!((mid.as_matrix() - rz(FRAC_PI_4).as_matrix()).abs().max() < 1e-15);

    let mut rng = rng_from_seed(9);
    for n in [2, 3, 4, 5] {
        for _ in 0..20 {
            let (r, s, q) = (random_rotation(&mut rng, n), random_rotation(&mut rng, n), random_rotation(&mut rng, n));
            let (Ok(d), Ok(dq)) = (so_distance(&r, &s), so_distance(&q.mul(&r), &q.mul(&s))) else {
                continue;
            };
            assert!((d - dq).abs() < 1e-9);
            assert!(so_distance(&r, &so_geodesic(&r, &s, 0.0).unwrap()).unwrap() < 1e-12);
            let t = 0.3;
            let dt = so_distance(&r, &so_geodesic(&r, &s, t).unwrap()).unwrap();
            assert!((dt - t * d).abs() < 1e-9);
        }
    }
}

#[test]
fn round_trip_within_injectivity_radius() {
    let mut rng = rng_from_seed(2);
    for n in [2, 3, 4, 6] {
        for _ in 0..50 {
            let r = random_rotation(&mut rng, n);
            let v = random_skew(&mut rng, n, 0.5);
            let back = so_log(&r, &so_exp(&r, &v).unwrap()).unwrap();
            assert!((back.to_matrix() - v.to_matrix()).abs().max() < 1e-9);
        }
    }
}

#[test]
fn closed_form_agrees_with_series() {
    let mut rng = rng_from_seed(4);
    for _ in 0..100 {
        let v = random_skew(&mut rng, 3, 1.0);
        let a = exp_skew(&v);
        let b = exp_skew_series(&v);
        assert!((a.as_matrix() - b.as_matrix()).abs().max() < 1e-12);
        let la = log_rotation(&a).unwrap();
        let lb = log_rotation_series(&a).unwrap();
        assert!((la.to_matrix() - lb.to_matrix()).abs().max() < 1e-9);
    }
}

#[test]
fn transport_project_retract() {
    let mut rng = rng_from_seed(6);
    let r = random_rotation(&mut rng, 4);
    let s = random_rotation(&mut rng, 4);
    let v = random_skew(&mut rng, 4, 1.0).to_matrix();
    let h = r.as_matrix() * &v;

    assert!((so_transport(&r, &r, &h).unwrap() - &h).abs().max() < 1e-15);
    let out = so_transport(&r, &s, &h).unwrap();
    let g_in = so_inner(&r, &h, &h).unwrap();
    assert!((so_inner(&s, &out, &out).unwrap() - g_in).abs() < 1e-12);
    assert!((s.as_matrix().transpose() * &out - &v).abs().max() < 1e-12);

    assert!((so_project(&r, &h).unwrap().to_matrix() - &v).abs().max() < 1e-13);
    assert!(so_project(&r, r.as_matrix()).unwrap().norm() < 1e-13);

    assert!((so_retract(&r, &DMatrix::zeros(4, 4)).unwrap().as_matrix() - r.as_matrix()).abs().max() < 1e-14);
    let q = so_retract(&r, &(&h * 0.1)).unwrap();
    assert!((q.as_matrix().transpose() * q.as_matrix() - DMatrix::identity(4, 4)).abs().max() < 1e-12);
}

#[test]
fn mean_examples() {
    let r = rz(0.7);
    assert_eq!(so_frechet_mean(std::slice::from_ref(&r), None).unwrap().as_matrix(), r.as_matrix());
    let mean = so_frechet_mean(&[rz(0.6), rz(-0.6)], None).unwrap();
    assert!((mean.as_matrix() - DMatrix::identity(3, 3)).abs().max() < 1e-12);

    let s = RotationMatrix::axis_angle([1.0, 1.0, 0.0], 0.8).unwrap();
    let mean = so_frechet_mean(&[r.clone(), r.clone(), r.clone(), s.clone()], None).unwrap();
    let quarter = so_geodesic(&r, &s, 0.25).unwrap();
    assert!((mean.as_matrix() - quarter.as_matrix()).abs().max() < 1e-9);
}

#[test]
fn cut_locus_is_reported() {
    let i3 = RotationMatrix::identity(3);
    let err = so_log(&i3, &rz(PI)).unwrap_err();
    assert_eq!(err.name(), "CutLocusError");
    assert!(RotationMatrix::new(diag(&[1.0, 1.0, -1.0])).is_err());
}
