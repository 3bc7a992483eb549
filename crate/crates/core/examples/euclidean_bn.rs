//! On a single Euclidean feature LieBN is ordinary batch normalization.

use liebn::liebn::LieBn;
use liebn::Euclidean;
use nalgebra::DVector;

fn main() -> liebn::Result<()> {
    let xs = [1.0, 2.5, -0.5, 4.0, 3.0];
    let batch: Vec<_> = xs.iter().map(|&x| DVector::from_element(1, x)).collect();
    let (gamma, beta, eps) = (2.0, 0.5, 1e-5);

    let mut layer = LieBn::new(Euclidean::new(1)?, gamma, eps, 0.1)?.with_bias(DVector::from_element(1, beta))?;
    let out = layer.forward(&batch)?;

    let mu = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / xs.len() as f64;
    for (x, y) in xs.iter().zip(&out) {
        let textbook = gamma * (x - mu) / (var + eps).sqrt() + beta;
        println!("{x:5.2} -> {:9.6} (textbook {textbook:9.6})", y[0]);
    }
    Ok(())
}
