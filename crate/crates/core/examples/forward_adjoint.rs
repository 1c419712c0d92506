//! Simulate a two-shot CASSI measurement and check the adjoint with the
//! dot-product test `<Phi x, y> = <x, Phi^T y>`.
//!
//! cargo run --example forward_adjoint

use cassi::optics::{adjoint, forward};
use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::rng::SplitMix64;
use cassi::sampling::{complement_mask, random_mask};
use cassi::{Measurement, MeasurementSet, SensingConfig};

fn main() -> cassi::Result<()> {
    let cfg = SensingConfig::new(16, 16, 6, 2, 2)?;
    let x = make_phantom(&PhantomSpec::default_for(&cfg, 1), &cfg);
    let mask = random_mask(&cfg, 0.5, 42)?;
    let apertures = vec![mask.clone(), complement_mask(&mask)];

    let y = forward(&x, &apertures, &cfg)?;
    println!(
        "cube {}x{}x{} -> {} snapshots of {}x{}",
        cfg.bands,
        cfg.height,
        cfg.width,
        y.len(),
        cfg.height,
        cfg.measurement_width()
    );

    let mut rng = SplitMix64::new(9);
    let r = MeasurementSet::new(
        (1..=cfg.shots)
            .map(|i| {
                let data = (0..cfg.measurement_len()).map(|_| rng.next_f64()).collect();
                Measurement::new(i, cfg.height, cfg.measurement_width(), data)
            })
            .collect::<cassi::Result<_>>()?,
    )?;
    let lhs: f64 = y.stacked().iter().zip(r.stacked()).map(|(a, b)| a * b).sum();
    let rhs = x.dot(&adjoint(&r, &apertures, &cfg)?)?;
    println!("<Phi x, r> = {lhs:.12}");
    println!("<x, Phi^T r> = {rhs:.12}");
    println!("relative gap = {:.3e}", (lhs - rhs).abs() / lhs.abs());
    Ok(())
}
