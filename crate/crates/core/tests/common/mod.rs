#![allow(dead_code)]

use std::sync::OnceLock;

use liebn::matkernels::{SpdMatrix, SymMatrix};
use nalgebra::DMatrix;
use serde_json::Value;

/// Frozen reference values, see `data/oracles.py`.
pub fn oracle() -> &'static Value {
    static ORACLE: OnceLock<Value> = OnceLock::new();
    ORACLE.get_or_init(|| serde_json::from_str(include_str!("../data/oracles.json")).unwrap())
}

pub fn matrix(v: &Value) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).unwrap();
    let n = rows.len();
    DMatrix::from_row_iterator(n, rows[0].len(), rows.into_iter().flatten())
}

pub fn spd(v: &Value) -> SpdMatrix {
    SpdMatrix::new(matrix(v)).unwrap()
}

pub fn sym(v: &Value) -> SymMatrix {
    SymMatrix::new(matrix(v)).unwrap()
}

pub fn spd_rows(n: usize, entries: &[f64]) -> SpdMatrix {
    SpdMatrix::from_row_slice(n, entries).unwrap()
}

pub fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn rel_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// Fixed inputs shared with the oracle script.
pub const A: [f64; 9] = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
pub const B: [f64; 9] = [2.0, -0.3, 0.1, -0.3, 1.5, 0.4, 0.1, 0.4, 1.0];
pub const C: [f64; 9] = [1.0, 0.0, 0.3, 0.0, 2.0, 0.0, 0.3, 0.0, 0.7];
pub const S: [f64; 9] = [0.3, -0.2, 0.1, -0.2, -0.5, 0.4, 0.1, 0.4, 0.2];
pub const G: [f64; 9] = [1.0, 0.5, -0.2, 0.5, -0.3, 0.7, -0.2, 0.7, 0.4];
pub const W: [f64; 3] = [0.2, 0.5, 0.3];

pub fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}
