//! SO(n): exponential, logarithm, geodesics and the Karcher mean.

use liebn::random::{random_rotation, random_rotation_near, rng_from_seed};
use liebn::so::{so_distance, so_exp, so_frechet_mean, so_geodesic, so_log, RotationMatrix, SkewMatrix};

fn main() -> liebn::Result<()> {
    let r = RotationMatrix::axis_angle([0.0, 0.0, 1.0], 0.4)?;
    let v = SkewMatrix::from_axis([0.3, -0.2, 0.5]);
    let s = so_exp(&r, &v)?;
    let back = so_log(&r, &s)?;
    println!("log(exp(V)) error {:.2e}", (back.to_matrix() - v.to_matrix()).norm());

    let mid = so_geodesic(&r, &s, 0.5)?;
    println!(
        "geodesic midpoint: {:.6} + {:.6} = {:.6}",
        so_distance(&r, &mid)?,
        so_distance(&mid, &s)?,
        so_distance(&r, &s)?
    );

    let mut rng = rng_from_seed(11);
    let center = random_rotation(&mut rng, 4);
    let batch: Vec<_> = (0..10).map(|_| random_rotation_near(&mut rng, &center, 0.2)).collect();
    let mean = so_frechet_mean(&batch, None)?;
    println!("SO(4) mean is {:.4} from the sampling center", so_distance(&mean, &center)?);
    Ok(())
}
