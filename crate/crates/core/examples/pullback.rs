//! LieBN computed directly and through the pullback map agree.

use liebn::liebn::{liebn_via_pullback, LieBn};
use liebn::random::{random_spd, rng_from_seed};
use liebn::spd::{SpdFamily, SpdMetric};

fn main() -> liebn::Result<()> {
    let mut rng = rng_from_seed(3);
    let batch: Vec<_> = (0..8).map(|_| random_spd(&mut rng, 3, 0.8)).collect();

    for family in [SpdFamily::Aim, SpdFamily::Lem, SpdFamily::Lcm] {
        let metric = SpdMetric::new(family, 3, 0.5, 1.0, 0.0)?;
        let layer = LieBn::new(metric, 1.3, 1e-5, 0.1)?;
        let (via, _) = liebn_via_pullback(&layer, &batch)?;
        let direct = layer.clone().forward(&batch)?;
        let gap = via
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a.as_matrix() - b.as_matrix()).norm())
            .fold(0.0, f64::max);
        println!("{family:?} θ = 0.5: max gap {gap:.2e}");
    }
    Ok(())
}
