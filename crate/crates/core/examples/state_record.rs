//! Saving and restoring a layer through its JSON record.

use liebn::liebn::{LieBn, LieBnRecord, Mode};
use liebn::random::{random_rotation, rng_from_seed};
use liebn::so::SoGroup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let group = SoGroup::new(3)?;
    let mut rng = rng_from_seed(2);
    let mut layer = LieBn::new(group, 1.0, 1e-5, 0.1)?;
    let center = random_rotation(&mut rng, 3);
    for _ in 0..3 {
        let batch: Vec<_> = (0..8)
            .map(|_| liebn::random::random_rotation_near(&mut rng, &center, 0.2))
            .collect();
        layer.forward(&batch)?;
    }
    layer.set_mode(Mode::Eval);

    let json = serde_json::to_string_pretty(&layer.to_record())?;
    println!("{json}");
    let record: LieBnRecord = serde_json::from_str(&json)?;
    let restored = LieBn::from_record(group, &record)?;
    println!("restored running var {}", restored.running_var());
    Ok(())
}
