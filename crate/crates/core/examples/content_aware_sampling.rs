//! Progressive acquisition: each snapshot shapes the next coded aperture.
//!
//! cargo run --release --example content_aware_sampling

use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::sampling::{
    acquire, plan_shots, random_mask, NoiseModel, PredictorConfig, Schedule, ShotMode, ShotPlan,
};
use cassi::SensingConfig;

fn main() -> cassi::Result<()> {
    let cfg = SensingConfig::new(48, 48, 8, 1, 3)?;
    let scene = make_phantom(&PhantomSpec::default_for(&cfg, 11), &cfg);
    let shared = (0..cfg.shots)
        .map(|i| random_mask(&cfg, 0.5, 100 + i as u64))
        .collect::<cassi::Result<Vec<_>>>()?;

    let predictor = PredictorConfig::with_defaults(shared.clone(), 0.1)?;
    let plan = ShotPlan::new(ShotMode::ContentAware(predictor), cfg.shots, 0)?;
    assert!(matches!(plan_shots(&plan, &cfg)?, Schedule::Progressive(_)));

    let acq = acquire(&scene, &plan, &cfg, &NoiseModel::shot11(1))?;
    for (i, (mask, base)) in acq.apertures.iter().zip(&shared).enumerate() {
        let moved = mask
            .data()
            .iter()
            .zip(base.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let mean = mask.data().iter().sum::<f64>() / mask.data().len() as f64;
        println!("shot {}: {:?} mask, mean {mean:.3}, max change from shared {moved:.3}", i + 1, mask.kind());
    }
    Ok(())
}
