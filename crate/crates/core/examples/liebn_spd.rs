//! LieBN on SPD batches: train steps, then eval with running statistics.

use liebn::liebn::{LieBn, Mode};
use liebn::matkernels::SpdMatrix;
use liebn::random::{random_spd, rng_from_seed};
use liebn::spd::SpdMetric;
use liebn::LieGroup;

fn main() -> liebn::Result<()> {
    let metric = SpdMetric::aim(3, 1.0, 1.0, 0.0)?;
    let bias = SpdMatrix::from_diagonal(&[2.0, 1.0, 0.5])?;
    let mut layer = LieBn::new(metric, 0.8, 1e-5, 0.1)?.with_bias(bias.clone())?;
    let mut rng = rng_from_seed(1);

    for step in 1..=5 {
        let batch: Vec<_> = (0..16).map(|_| random_spd(&mut rng, 3, 1.0)).collect();
        let out = layer.forward(&batch)?;
        let stats = layer.batch_statistics(&out)?;
        println!(
            "step {step}: output mean at {:.2e} from B, variance {:.4} (target ~{:.4})",
            metric.distance(&stats.mean, &bias)?,
            stats.variance,
            0.8f64 * 0.8,
        );
    }

    layer.set_mode(Mode::Eval);
    let probe: Vec<_> = (0..4).map(|_| random_spd(&mut rng, 3, 1.0)).collect();
    let out = layer.forward(&probe)?;
    println!("eval: running var {:.4}, {} outputs", layer.running_var(), out.len());
    Ok(())
}
