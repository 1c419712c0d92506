//! Seeded synthetic scenes: Gaussian blobs with Gaussian spectral signatures
//! over a flat background.

use crate::cube::{HyperCube, SensingConfig};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    seed: u64,
    blobs: usize,
    background: f64,
    spectral_sigma: f64,
    radius_min: f64,
    radius_max: f64,
}

impl PhantomSpec {
    pub fn new(
        seed: u64,
        blobs: usize,
        background: f64,
        spectral_sigma: f64,
        radius: (f64, f64),
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&background) {
            return Err(Error::InvalidParameter(format!(
                "background level {background} outside [0, 1]"
            )));
        }
        if !(spectral_sigma > 0.0 && spectral_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectral sigma must be positive, got {spectral_sigma}"
            )));
        }
        let (radius_min, radius_max) = radius;
        if !(radius_min > 0.0 && radius_max.is_finite() && radius_min <= radius_max) {
            return Err(Error::InvalidParameter(format!(
                "radius range ({radius_min}, {radius_max}) must satisfy 0 < min <= max"
            )));
        }
        Ok(Self {
            seed,
            blobs,
            background,
            spectral_sigma,
            radius_min,
            radius_max,
        })
    }

    /// A reasonable scene for a given image size: a dozen blobs whose radii
    /// scale with the shorter image side.
    pub fn default_for(config: &SensingConfig, seed: u64) -> Self {
        let side = config.height.min(config.width) as f64;
        let r_max = (side / 4.0).max(1.0);
        let r_min = (side / 12.0).max(0.5).min(r_max);
        Self::new(seed, 12, 0.05, (config.bands as f64 / 4.0).max(0.5), (r_min, r_max))
            .expect("default phantom parameters are valid")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn blobs(&self) -> usize {
        self.blobs
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    pub fn spectral_sigma(&self) -> f64 {
        self.spectral_sigma
    }

    pub fn radius(&self) -> (f64, f64) {
        (self.radius_min, self.radius_max)
    }
}

struct Blob {
    row: f64,
    col: f64,
    radius: f64,
    amplitude: f64,
    center_band: f64,
}

/// Generates the phantom cube. Per blob the generator draws, in order:
/// center row, center column, radius, amplitude, spectral center band.
pub fn make_phantom(spec: &PhantomSpec, config: &SensingConfig) -> HyperCube {
    let mut rng = SplitMix64::new(spec.seed);
    let blobs: Vec<Blob> = (0..spec.blobs)
        .map(|_| Blob {
            row: rng.next_f64() * config.height as f64,
            col: rng.next_f64() * config.width as f64,
            radius: spec.radius_min + rng.next_f64() * (spec.radius_max - spec.radius_min),
            amplitude: 0.3 + 0.7 * rng.next_f64(),
            center_band: rng.next_f64() * (config.bands - 1) as f64,
        })
        .collect();

    let two_sigma2 = 2.0 * spec.spectral_sigma * spec.spectral_sigma;
    // spectral[k][c], spatial weights evaluated per pixel
    let spectral: Vec<Vec<f64>> = blobs
        .iter()
        .map(|b| {
            (0..config.bands)
                .map(|c| (-(c as f64 - b.center_band).powi(2) / two_sigma2).exp())
                .collect()
        })
        .collect();

    let mut cube = HyperCube::for_config(config);
    for h in 0..config.height {
        for w in 0..config.width {
            let spatial: Vec<f64> = blobs
                .iter()
                .map(|b| {
                    let d2 = (h as f64 + 0.5 - b.row).powi(2) + (w as f64 + 0.5 - b.col).powi(2);
                    b.amplitude * (-d2 / (2.0 * b.radius * b.radius)).exp()
                })
                .collect();
            for c in 0..config.bands {
                let v = spatial
                    .iter()
                    .zip(&spectral)
                    .fold(spec.background, |v, (s, sig)| v + s * sig[c]);
                cube.set(c, h, w, v.clamp(0.0, 1.0));
            }
        }
    }
    cube
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SensingConfig {
        SensingConfig::new(8, 8, 4, 1, 1).unwrap()
    }

    #[test]
    fn no_blobs_no_background_is_zero() {
        let spec = PhantomSpec::new(1, 0, 0.0, 1.0, (1.0, 2.0)).unwrap();
        let cube = make_phantom(&spec, &cfg());
        assert!(cube.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn values_clamped_to_unit_interval() {
        let spec = PhantomSpec::new(5, 40, 0.9, 2.0, (1.0, 4.0)).unwrap();
        let cube = make_phantom(&spec, &cfg());
        assert!(cube.data().iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(cube.data().contains(&1.0));
    }

    #[test]
    fn seeded_determinism() {
        let spec = PhantomSpec::new(7, 3, 0.1, 1.0, (1.0, 3.0)).unwrap();
        let a = make_phantom(&spec, &cfg());
        let b = make_phantom(&spec, &cfg());
        assert_eq!(a.data(), b.data());
        let c = make_phantom(&spec.clone().with_seed(8), &cfg());
        assert!(a.data().iter().zip(c.data()).any(|(x, y)| x != y));
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(PhantomSpec::new(0, 1, 1.5, 1.0, (1.0, 2.0)).is_err());
        assert!(PhantomSpec::new(0, 1, 0.5, 0.0, (1.0, 2.0)).is_err());
        assert!(PhantomSpec::new(0, 1, 0.5, 1.0, (3.0, 2.0)).is_err());
    }
}
