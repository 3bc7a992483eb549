//! Momentum LieBN with a scheduled train momentum, and a per-domain bank.

use liebn::liebn::{gamma_train, DsmBank, MLieBn, TrainMomentum};
use liebn::random::{random_spd, rng_from_seed};
use liebn::spd::SpdMetric;

fn main() -> liebn::Result<()> {
    for k in [1, 5, 10, 20] {
        println!("γ_train(K=10, k={k}, ρ=0.1) = {:.4}", gamma_train(10, k, 0.1)?);
    }

    let metric = SpdMetric::lcm(2, 1.0)?;
    let schedule = TrainMomentum::Scheduled { big_k: 10, rho: 0.1 };
    let mut rng = rng_from_seed(5);

    let mut layer = MLieBn::new(metric, 1.0, 1e-5, 0.1, schedule)?;
    for _ in 0..3 {
        let batch: Vec<_> = (0..8).map(|_| random_spd(&mut rng, 2, 1.0)).collect();
        layer.forward(&batch)?;
    }
    println!(
        "after 3 steps: train var {:.4}, eval var {:.4}",
        layer.train_running().variance,
        layer.eval_running().variance
    );

    let mut bank = DsmBank::new(metric, &[0, 1], 1.0, 1e-5, 0.1, schedule)?;
    let batch: Vec<_> = (0..8).map(|_| random_spd(&mut rng, 2, 1.0)).collect();
    let ids = [0, 1, 0, 1, 0, 1, 0, 1];
    bank.forward(&batch, &ids)?;
    for d in [0, 1] {
        let l = bank.layer(d).expect("domain exists");
        println!("domain {d}: eval var {:.4}", l.eval_running().variance);
    }
    Ok(())
}
