//! Matrix-kernel properties.

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::json;

use super::{entries, rel, Cell, Grid, PropertySpec, Tracker};
use crate::harness::config::Suite;
use crate::matkernels::{
    cholesky, clog, clog_inv, mexp, mlog, mpow, spd_fun, spd_fun_vjp, sym_eigendecompose, ScalarFn, SymMatrix,
};
use crate::random::{random_orthogonal, random_spd, random_sym};

/// `log` of the largest allowed condition number, halved: spectra in `[10⁻², 10²]`.
const COND_1E4_SPREAD: f64 = 4.605_170_185_988_091;

const TRIALS: usize = 200;

fn per_dim(grid: &Grid, default: &[usize], run: fn(usize, &mut rand_chacha::ChaCha20Rng) -> super::CellOutcome) -> Vec<Cell> {
    grid.dims(default, 1, 16)
        .into_iter()
        .map(|n| Cell::new(None, move |rng| run(n, rng)))
        .collect()
}

fn eigpair_cells(grid: &Grid) -> Vec<Cell> {
    per_dim(grid, &[2, 3, 4, 5, 6, 8], |n, rng| {
        let mut t = Tracker::new();
        for trial in 0..TRIALS {
            let s = random_sym(rng, n, 1.0);
            let result = sym_eigendecompose(&s).map(|e| {
                let u = &e.vectors;
                let orth = (u.transpose() * u - DMatrix::identity(n, n)).norm();
                let recon = rel(&e.reconstruct(), s.as_matrix());
                let sorted = e.values.as_slice().windows(2).all(|w| w[0] >= w[1]);
                if sorted { orth.max(recon) } else { 1.0 }
            });
            t.record(result, || json!({"dim": n, "trial": trial, "S": entries(s.as_matrix())}));
        }
        t.finish()
    })
}

const POWERS: [f64; 6] = [-2.0, -1.5, 0.5, 1.5, 2.0, 3.0];

fn round_trip_cells(grid: &Grid) -> Vec<Cell> {
    per_dim(grid, &[2, 3, 5, 8], |n, rng| {
        let mut t = Tracker::new();
        for trial in 0..TRIALS {
            let p = random_spd(rng, n, COND_1E4_SPREAD);
            let theta = POWERS[rng.random_range(0..POWERS.len())];
            let result = (|| {
                let s = mlog(&p);
                let a = rel(mexp(&s).as_matrix(), p.as_matrix());
                let b = rel(mlog(&mexp(&s)).as_matrix(), s.as_matrix());
                let c = rel(clog_inv(&clog(&p)?)?.as_matrix(), p.as_matrix());
                let d = rel(mpow(&mpow(&p, 1.0 / theta), theta).as_matrix(), p.as_matrix());
                Ok(a.max(b).max(c).max(d))
            })();
            t.record(result, || json!({"dim": n, "trial": trial, "theta": theta, "P": entries(p.as_matrix())}));
        }
        t.finish()
    })
}

fn pow_conjugation_cells(grid: &Grid) -> Vec<Cell> {
    per_dim(grid, &[2, 3, 4, 5, 6], |n, rng| {
        let mut t = Tracker::new();
        for trial in 0..TRIALS {
            let p = random_spd(rng, n, COND_1E4_SPREAD);
            let q = random_orthogonal(rng, n);
            let theta = POWERS[rng.random_range(0..POWERS.len())];
            let result = (|| {
                let identity = rel(mpow(&p, 1.0).as_matrix(), p.as_matrix());
                let generic = rel(&spd_fun(&p.as_sym(), ScalarFn::Pow(1.0))?.into_matrix(), p.as_matrix());
                let conj = SymMatrix::new(&q * p.as_matrix() * q.transpose())?;
                let lhs = spd_fun(&conj, ScalarFn::Pow(theta))?.into_matrix();
                let rhs = &q * mpow(&p, theta).as_matrix() * q.transpose();
                Ok(identity.max(generic).max(rel(&lhs, &rhs)))
            })();
            t.record(result, || {
                json!({"dim": n, "trial": trial, "theta": theta, "P": entries(p.as_matrix()), "Q": entries(&q)})
            });
        }
        t.finish()
    })
}

const VJP_FUNCTIONS: [ScalarFn; 6] = [
    ScalarFn::Exp,
    ScalarFn::Log,
    ScalarFn::Pow(0.5),
    ScalarFn::Pow(-0.5),
    ScalarFn::Pow(1.5),
    ScalarFn::Pow(-1.5),
];

/// Full gradient of `S ↦ ⟨U, f(S)⟩` by central differences over the symmetric basis.
fn fd_gradient(s: &DMatrix<f64>, f: ScalarFn, u: &DMatrix<f64>, h: f64) -> crate::Result<DMatrix<f64>> {
    let n = s.nrows();
    let phi = |m: DMatrix<f64>| -> crate::Result<f64> { Ok(spd_fun(&SymMatrix::new(m)?, f)?.as_matrix().dot(u)) };
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut d = DMatrix::zeros(n, n);
            d[(i, j)] = 1.0;
            d[(j, i)] = 1.0;
            let slope = (phi(s + &d * h)? - phi(s - &d * h)?) / (2.0 * h);
            if i == j {
                g[(i, i)] = slope;
            } else {
                g[(i, j)] = slope / 2.0;
                g[(j, i)] = slope / 2.0;
            }
        }
    }
    Ok(g)
}

fn vjp_cells(grid: &Grid) -> Vec<Cell> {
    let mut cells = Vec::new();
    for n in grid.dims(&[2, 3, 4, 5, 6], 1, 10) {
        for f in VJP_FUNCTIONS {
            cells.push(Cell::new(None, move |rng| {
                let mut t = Tracker::new();
                for trial in 0..100 {
                    let p = random_spd(rng, n, 1.0);
                    let u = random_sym(rng, n, 1.0);
                    let result = (|| {
                        let analytic = spd_fun_vjp(&p, f, &u)?.into_matrix();
                        let fd = fd_gradient(p.as_matrix(), f, u.as_matrix(), 1e-5)?;
                        Ok(rel(&fd, &analytic))
                    })();
                    t.record(result, || {
                        json!({"dim": n, "trial": trial, "f": format!("{f:?}"), "S": entries(p.as_matrix()), "U": entries(u.as_matrix())})
                    });
                }
                t.finish()
            }));
        }
    }
    cells
}

fn cholesky_cells(grid: &Grid) -> Vec<Cell> {
    per_dim(grid, &[2, 3, 4, 5, 6, 8], |n, rng| {
        let mut t = Tracker::new();
        for trial in 0..TRIALS {
            let p = random_spd(rng, n, COND_1E4_SPREAD);
            let result = cholesky(&p).map(|l| {
                let l = l.as_matrix();
                let recon = rel(&(l * l.transpose()), p.as_matrix());
                let det = p.as_matrix().determinant();
                let prod: f64 = (0..n).map(|i| l[(i, i)] * l[(i, i)]).product();
                recon.max(((prod - det) / det).abs())
            });
            t.record(result, || json!({"dim": n, "trial": trial, "P": entries(p.as_matrix())}));
        }
        t.finish()
    })
}

pub(super) fn properties() -> Vec<PropertySpec> {
    vec![
        PropertySpec {
            id: "K1",
            module: "matkernels",
            suite: Suite::Geometry,
            description: "eigendecomposition: orthonormal vectors, sorted values, reconstruction",
            tolerance: 1e-10,
            covers: &["matkernels.eigpair"],
            cells: eigpair_cells,
        },
        PropertySpec {
            id: "K2",
            module: "matkernels",
            suite: Suite::Geometry,
            description: "mlog/mexp, clog/clog_inv and pow round trips (relative Frobenius, condition <= 1e4)",
            tolerance: 1e-10,
            covers: &["matkernels.round-trips"],
            cells: round_trip_cells,
        },
        PropertySpec {
            id: "K3",
            module: "matkernels",
            suite: Suite::Geometry,
            description: "pow(1) is the identity; pow commutes with orthogonal conjugation",
            tolerance: 1e-10,
            covers: &["matkernels.pow-identity-conjugation"],
            cells: pow_conjugation_cells,
        },
        PropertySpec {
            id: "K4",
            module: "matkernels",
            suite: Suite::Geometry,
            description: "Daleckii-Krein VJP vs central differences, relative gradient error",
            tolerance: 1e-5,
            covers: &["matkernels.vjp-finite-differences"],
            cells: vjp_cells,
        },
        PropertySpec {
            id: "K5",
            module: "matkernels",
            suite: Suite::Geometry,
            description: "Cholesky reconstruction and determinant as the squared diagonal product",
            tolerance: 1e-9,
            covers: &["matkernels.cholesky"],
            cells: cholesky_cells,
        },
    ]
}
