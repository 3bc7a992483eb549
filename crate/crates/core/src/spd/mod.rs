//! The three parameterized Lie-group structures on SPD matrices:
//! `(θ,α,β)`-AIM, `(α,β)`-LEM and `θ`-LCM.

mod metric;

pub use metric::{
    ab_inner, SpdFamily, SpdMetric, TangentVector, KARCHER_ACCEPT, KARCHER_MAX_ITERATIONS,
    KARCHER_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::group::BatchStats;
use crate::matkernels::SpdMatrix;

/// A non-empty batch of SPD matrices under one metric.
#[derive(Clone, Debug)]
pub struct SpdBatch {
    metric: SpdMetric,
    points: Vec<SpdMatrix>,
}

impl SpdBatch {
    pub fn new(metric: SpdMetric, points: Vec<SpdMatrix>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("empty batch".into()));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != metric.dim()) {
            return Err(Error::InvalidInput(format!(
                "batch point of dimension {} under a metric of dimension {}",
                p.dim(),
                metric.dim()
            )));
        }
        Ok(SpdBatch { metric, points })
    }

    pub fn metric(&self) -> &SpdMetric {
        &self.metric
    }

    pub fn points(&self) -> &[SpdMatrix] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<SpdMatrix> {
        self.points
    }

    pub fn frechet_mean(&self, weights: Option<&[f64]>) -> Result<SpdMatrix> {
        self.metric.frechet_mean(&self.points, weights)
    }

    pub fn frechet_variance(&self, mean: &SpdMatrix, weights: Option<&[f64]>) -> Result<f64> {
        self.metric.frechet_variance(&self.points, mean, weights)
    }

    /// Uniform-weight mean and variance.
    pub fn stats(&self) -> Result<BatchStats<SpdMatrix>> {
        let mean = self.frechet_mean(None)?;
        let variance = self.frechet_variance(&mean, None)?;
        Ok(BatchStats { mean, variance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matkernels::{LowerTriMatrix, SymMatrix};
    use std::f64::consts::E;

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn close(a: &SpdMatrix, b: &SpdMatrix, tol: f64) -> bool {
        (a.as_matrix() - b.as_matrix()).norm() <= tol
    }

    fn all_families(n: usize) -> Vec<SpdMetric> {
        vec![
            SpdMetric::aim(n, 1.0, 1.0, 0.0).unwrap(),
            SpdMetric::aim(n, 0.5, 1.0, 0.25).unwrap(),
            SpdMetric::lem(n, 1.0, 0.0).unwrap(),
            SpdMetric::lcm(n, 1.0).unwrap(),
            SpdMetric::lcm(n, -1.5).unwrap(),
        ]
    }

    #[test]
    fn ab_inner_examples() {
        let i2 = SymMatrix::identity(2);
        assert_eq!(ab_inner(&i2, &i2, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(ab_inner(&i2, &i2, 1.0, 1.0).unwrap(), 6.0);
        let v = SymMatrix::from_row_slice(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(ab_inner(&v, &i2, 1.0, 0.3).unwrap(), 0.0);
        assert!(matches!(
            ab_inner(&i2, &i2, 1.0, -0.5),
            Err(Error::InvalidMetric(_))
        ));
    }

    #[test]
    fn constructor_validation() {
        assert!(SpdMetric::aim(2, 0.0, 1.0, 0.0).is_err());
        assert!(SpdMetric::aim(3, 1.0, -1.0, 0.0).is_err());
        assert!(SpdMetric::new(SpdFamily::Lcm, 2, 1.0, 1.0, 0.25).is_err());
        assert!(SpdMetric::aim(3, 1.0, 1.0, -1.0 / 3.0).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        let v = TangentVector::Sym(SymMatrix::from_diagonal(&[1.0, 0.0]));
        assert!((lem.metric_inner_at(&SpdMatrix::identity(2), &v, &v).unwrap() - 1.0).abs() < 1e-14);

        let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
        let i = TangentVector::Sym(SymMatrix::identity(2));
        assert!((aim.metric_inner_at(&SpdMatrix::identity(2), &i, &i).unwrap() - 2.0).abs() < 1e-14);

        let lcm = SpdMetric::lcm(2, 1.0).unwrap();
        let x = TangentVector::Chol(LowerTriMatrix::identity(2));
        let g = lcm.metric_inner_at(&diag(&[4.0, 4.0]), &x, &x).unwrap();
        assert!((g - 0.5).abs() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        let d = lem.geodesic_distance(&diag(&[E * E, 1.0]), &SpdMatrix::identity(2)).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
        let d = aim.geodesic_distance(&diag(&[4.0, 4.0]), &SpdMatrix::identity(2)).unwrap();
        let oracle = (2.0 * 4f64.ln().powi(2)).sqrt();
        assert!((d - oracle).abs() < 1e-12);
        assert!((d - 1.960516).abs() < 1e-6);
        for m in all_families(2) {
            let p = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
            assert!(m.geodesic_distance(&p, &p).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn group_examples() {
        let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        assert!(close(
            &lem.group_compose(&diag(&[3.0, 3.0]), &diag(&[2.0, 2.0])).unwrap(),
            &diag(&[6.0, 6.0]),
            1e-12
        ));
        let lcm = SpdMetric::lcm(2, 1.0).unwrap();
        assert!(close(
            &lcm.group_compose(&diag(&[9.0, 9.0]), &diag(&[4.0, 4.0])).unwrap(),
            &diag(&[36.0, 36.0]),
            1e-12
        ));
        assert!(close(
            &lem.group_inverse(&diag(&[E, 1.0])).unwrap(),
            &diag(&[1.0 / E, 1.0]),
            1e-14
        ));
        let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
        assert!(close(
            &aim.group_inverse(&diag(&[4.0, 9.0])).unwrap(),
            &diag(&[0.25, 1.0 / 9.0]),
            1e-14
        ));
        let p = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        for m in all_families(2) {
            let e = SpdMatrix::identity(2);
            assert!(close(&m.group_compose(&e, &p).unwrap(), &p, 1e-12));
            assert!(close(&m.group_inverse(&e).unwrap(), &e, 1e-12));
            let inv = m.group_inverse(&p).unwrap();
            assert!(close(&m.group_compose(&inv, &p).unwrap(), &e, 1e-10));
        }
    }

    #[test]
    fn log_exp_examples() {
        let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        let v = lem.log_at(&SpdMatrix::identity(2), &diag(&[E * E, 1.0])).unwrap();
        assert!((v.as_matrix() - SymMatrix::from_diagonal(&[2.0, 0.0]).as_matrix()).norm() < 1e-12);
        let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
        let v = aim.log_at(&SpdMatrix::identity(2), &diag(&[4.0, 4.0])).unwrap();
        let l4 = 4f64.ln();
        assert!((v.as_matrix() - SymMatrix::from_diagonal(&[l4, l4]).as_matrix()).norm() < 1e-12);
        let p = aim.exp_at(&SpdMatrix::identity(2), &SymMatrix::identity(2)).unwrap();
        assert!(close(&p, &diag(&[E, E]), 1e-12));

        let p = SpdMatrix::from_row_slice(3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 1.5]).unwrap();
        let q = SpdMatrix::from_row_slice(3, &[1.0, -0.4, 0.0, -0.4, 3.0, 0.5, 0.0, 0.5, 0.7]).unwrap();
        for m in all_families(3) {
            assert!(m.log_at(&p, &p).unwrap().norm() < 1e-12);
            assert!(close(&m.exp_at(&p, &SymMatrix::zeros(3)).unwrap(), &p, 1e-12));
            let v = m.log_at(&p, &q).unwrap();
            assert!(close(&m.exp_at(&p, &v).unwrap(), &q, 1e-9), "{:?}", m);
        }
    }

    #[test]
    fn mean_examples() {
        let lem = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        let batch = vec![diag(&[E * E, 1.0]), diag(&[1.0, E * E])];
        let m = lem.frechet_mean(&batch, None).unwrap();
        assert!(close(&m, &diag(&[E, E]), 1e-12));
        let v = lem.frechet_variance(&batch, &m, None).unwrap();
        assert!((v - 2.0).abs() < 1e-12);

        let aim = SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap();
        let m = aim
            .frechet_mean(&[diag(&[4.0, 9.0]), diag(&[0.25, 1.0 / 9.0])], None)
            .unwrap();
        assert!(close(&m, &SpdMatrix::identity(2), 1e-10));

        let p = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        for m in all_families(2) {
            assert_eq!(m.frechet_mean(std::slice::from_ref(&p), None).unwrap(), p);
        }
    }

    #[test]
    fn wfm_pair_examples() {
        let p1 = diag(&[4.0, 4.0]);
        let p2 = SpdMatrix::identity(2);
        for m in [SpdMetric::aim(2, 1.0, 1.0, 0.0).unwrap(), SpdMetric::lem(2, 1.0, 0.0).unwrap()] {
            assert!(close(&m.wfm_pair(&p1, &p2, 0.5).unwrap(), &diag(&[2.0, 2.0]), 1e-12));
        }
        let q = SpdMatrix::from_row_slice(2, &[2.0, 0.3, 0.3, 1.0]).unwrap();
        for m in all_families(2) {
            assert!(close(&m.wfm_pair(&p1, &q, 0.0).unwrap(), &q, 1e-12));
            assert!(close(&m.wfm_pair(&p1, &q, 1.0).unwrap(), &p1, 1e-12));
            let direct = m.frechet_mean(&[p1.clone(), q.clone()], Some(&[0.3, 0.7])).unwrap();
            assert!(close(&m.wfm_pair(&p1, &q, 0.3).unwrap(), &direct, 1e-8));
            assert!(matches!(m.wfm_pair(&p1, &q, 1.5), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn batch_validation() {
        let m = SpdMetric::lem(2, 1.0, 0.0).unwrap();
        assert!(SpdBatch::new(m, vec![]).is_err());
        assert!(SpdBatch::new(m, vec![SpdMatrix::identity(3)]).is_err());
        let b = SpdBatch::new(m, vec![SpdMatrix::identity(2); 3]).unwrap();
        let s = b.stats().unwrap();
        assert_eq!(s.variance, 0.0);
    }
}
