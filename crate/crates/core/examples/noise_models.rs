//! Gaussian and 11-bit shot noise on a constant measurement.
//!
//! cargo run --example noise_models

use cassi::sampling::{inject_noise, NoiseKind, NoiseModel};
use cassi::{Measurement, MeasurementSet};

fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}

fn main() -> cassi::Result<()> {
    let clean = MeasurementSet::single(Measurement::new(1, 100, 100, vec![1.0; 10_000])?);
    let models = [
        NoiseModel::none(),
        NoiseModel::new(NoiseKind::Gaussian { sigma: 0.05 }, 3)?,
        NoiseModel::shot11(3),
    ];
    for model in models {
        let noisy = inject_noise(&clean, &model)?;
        let (mean, var) = moments(noisy.get(0).data());
        println!("{:<40} mean {mean:.5}  variance {var:.3e}", format!("{:?}", model.kind()));
    }
    println!("shot11 reference variance 1/2047 = {:.3e}", 1.0 / 2047.0);
    Ok(())
}
