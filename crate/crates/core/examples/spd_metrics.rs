//! Distances and group operations under the three SPD structures.

use liebn::matkernels::SpdMatrix;
use liebn::spd::{SpdFamily, SpdMetric};
use liebn::LieGroup;

fn main() -> liebn::Result<()> {
    let p = SpdMatrix::from_row_slice(2, &[4.0, 1.0, 1.0, 3.0])?;
    let q = SpdMatrix::from_diagonal(&[0.5, 2.0])?;

    for family in [SpdFamily::Aim, SpdFamily::Lem, SpdFamily::Lcm] {
        let m = SpdMetric::new(family, 2, 1.0, 1.0, 0.0)?;
        let d = m.distance(&p, &q)?;
        // Left translation by any point leaves the distance unchanged.
        let r = SpdMatrix::from_row_slice(2, &[2.0, -0.3, -0.3, 1.0])?;
        let moved = m.distance(&m.compose(&r, &p)?, &m.compose(&r, &q)?)?;
        println!("{family:?}: dist = {d:.6}, after translation = {moved:.6}");
    }

    // Power-deformed AIM.
    for theta in [0.5, 1.0, 2.0] {
        let m = SpdMetric::aim(2, theta, 1.0, 0.0)?;
        println!("AIM θ = {theta}: dist = {:.6}", m.distance(&p, &q)?);
    }
    Ok(())
}
