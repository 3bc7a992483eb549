//! Weighted Fréchet means: closed form for LEM/LCM, Karcher flow for AIM.

use liebn::random::{random_spd, rng_from_seed};
use liebn::spd::{SpdFamily, SpdMetric};
use liebn::LieGroup;

fn main() -> liebn::Result<()> {
    let mut rng = rng_from_seed(7);
    let batch: Vec<_> = (0..12).map(|_| random_spd(&mut rng, 3, 1.0)).collect();
    let weights: Vec<f64> = (1..=12).map(|i| i as f64 / 78.0).collect();

    for family in [SpdFamily::Aim, SpdFamily::Lem, SpdFamily::Lcm] {
        let m = SpdMetric::new(family, 3, 1.0, 1.0, 0.0)?;
        let mean = m.frechet_mean(&batch, Some(&weights))?;
        let var = m.frechet_variance(&batch, &mean, Some(&weights))?;
        println!("{family:?}: variance {var:.5}, mean {:?}", mean.to_row_major());
    }

    // Two-point weighted mean is a point on the geodesic.
    let aim = SpdMetric::aim(3, 1.0, 1.0, 0.0)?;
    let mid = aim.wfm_pair(&batch[0], &batch[1], 0.25)?;
    let d = aim.distance(&batch[0], &batch[1])?;
    println!(
        "wfm_pair(0.25): {:.6} + {:.6} = {:.6}",
        aim.distance(&batch[0], &mid)?,
        aim.distance(&mid, &batch[1])?,
        d
    );
    Ok(())
}
