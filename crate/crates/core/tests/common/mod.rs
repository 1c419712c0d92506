#![allow(dead_code)]

use cassi::rng::SplitMix64;
use cassi::sampling::random_mask;
use cassi::{CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};

pub fn uniform_cube(cfg: &SensingConfig, seed: u64) -> HyperCube {
    let mut rng = SplitMix64::new(seed);
    let data = (0..cfg.cube_len()).map(|_| rng.next_f64()).collect();
    HyperCube::from_vec(cfg.bands, cfg.height, cfg.width, data).unwrap()
}

pub fn uniform_measurements(cfg: &SensingConfig, seed: u64) -> MeasurementSet {
    let mut rng = SplitMix64::new(seed);
    let shots = (1..=cfg.shots)
        .map(|i| {
            let data = (0..cfg.measurement_len()).map(|_| rng.next_f64()).collect();
            Measurement::new(i, cfg.height, cfg.measurement_width(), data).unwrap()
        })
        .collect();
    MeasurementSet::new(shots).unwrap()
}

pub fn binary_masks(cfg: &SensingConfig, seed: u64) -> Vec<CodedAperture> {
    (0..cfg.shots)
        .map(|i| random_mask(cfg, 0.5, seed + i as u64).unwrap())
        .collect()
}

pub fn continuous_masks(cfg: &SensingConfig, seed: u64) -> Vec<CodedAperture> {
    let mut rng = SplitMix64::new(seed);
    (0..cfg.shots)
        .map(|_| {
            let data = (0..cfg.plane_len()).map(|_| rng.next_f64()).collect();
            CodedAperture::from_values(cfg.height, cfg.width, data).unwrap()
        })
        .collect()
}

/// Continuous masks bounded away from zero, so every measurement pixel is
/// covered.
pub fn covering_masks(cfg: &SensingConfig, seed: u64) -> Vec<CodedAperture> {
    let mut rng = SplitMix64::new(seed);
    (0..cfg.shots)
        .map(|_| {
            let data = (0..cfg.plane_len()).map(|_| 0.2 + 0.8 * rng.next_f64()).collect();
            CodedAperture::from_values(cfg.height, cfg.width, data).unwrap()
        })
        .collect()
}

pub fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
