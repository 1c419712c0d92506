use crate::cube::{Measurement, MeasurementSet};
use crate::error::{Error, Result};
use crate::rng::Gaussian;

pub const DEFAULT_FULL_SCALE: u32 = 2047;
/// Below this mean, Poisson draws use sequential-search inversion.
const POISSON_INVERSION_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    None,
    /// Additive white noise, standard deviation in measurement units.
    Gaussian { sigma: f64 },
    /// Poisson photon noise at a quantized full-scale count.
    Shot { full_scale: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    seed: u64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, seed: u64) -> Result<Self> {
        match kind {
            NoiseKind::Gaussian { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")))
            }
            NoiseKind::Shot { full_scale: 0 } => {
                Err(Error::InvalidParameter("full scale must be at least 1".into()))
            }
            _ => Ok(Self { kind, seed }),
        }
    }

    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            seed: 0,
        }
    }

    /// 11-bit shot noise (`full_scale = 2^11 - 1`).
    pub fn shot11(seed: u64) -> Self {
        Self {
            kind: NoiseKind::Shot {
                full_scale: DEFAULT_FULL_SCALE,
            },
            seed,
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

fn poisson(mean: f64, rng: &mut Gaussian) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    if mean < POISSON_INVERSION_LIMIT {
        let u = rng.uniform();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u32;
        while u > cdf && k < 10_000 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k as f64
    } else {
        (mean + mean.sqrt() * rng.sample()).round().max(0.0)
    }
}

/// Adds noise to every element, shots in order, elements in linear order.
pub fn inject_noise(measurements: &MeasurementSet, model: &NoiseModel) -> Result<MeasurementSet> {
    let mut rng = Gaussian::new(model.seed);
    match model.kind {
        NoiseKind::None => Ok(measurements.clone()),
        NoiseKind::Gaussian { sigma } => {
            if sigma == 0.0 {
                return Ok(measurements.clone());
            }
            rebuild(measurements, |v| v + sigma * rng.sample())
        }
        NoiseKind::Shot { full_scale } => {
            if measurements.iter().flat_map(|s| s.data()).any(|&v| v < 0.0) {
                return Err(Error::InvalidParameter(
                    "shot noise requires non-negative measurements".into(),
                ));
            }
            let peak = measurements
                .iter()
                .flat_map(|s| s.data())
                .cloned()
                .fold(0.0, f64::max);
            let peak = if peak > 0.0 { peak } else { 1.0 };
            let fs = full_scale as f64;
            rebuild(measurements, |v| poisson(v * fs / peak, &mut rng) * peak / fs)
        }
    }
}

fn rebuild(measurements: &MeasurementSet, mut f: impl FnMut(f64) -> f64) -> Result<MeasurementSet> {
    let shots = measurements
        .iter()
        .map(|s| {
            let data = s.data().iter().map(|&v| f(v)).collect();
            Measurement::new(s.shot(), s.height(), s.width(), data)
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(shots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(values: Vec<f64>) -> MeasurementSet {
        let n = values.len();
        MeasurementSet::single(Measurement::new(1, 1, n, values).unwrap())
    }

    #[test]
    fn none_and_zero_sigma_are_identity() {
        let y = set(vec![0.1, 0.5, 0.9]);
        assert_eq!(inject_noise(&y, &NoiseModel::none()).unwrap(), y);
        let g = NoiseModel::new(NoiseKind::Gaussian { sigma: 0.0 }, 4).unwrap();
        assert_eq!(inject_noise(&y, &g).unwrap(), y);
    }

    #[test]
    fn shot_noise_on_zero_is_zero() {
        let y = set(vec![0.0; 16]);
        let out = inject_noise(&y, &NoiseModel::shot11(9)).unwrap();
        assert!(out.get(0).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shot_noise_rejects_negative() {
        let y = set(vec![0.5, -0.1]);
        assert!(inject_noise(&y, &NoiseModel::shot11(1)).is_err());
    }

    #[test]
    fn invalid_models() {
        assert!(NoiseModel::new(NoiseKind::Gaussian { sigma: -1.0 }, 0).is_err());
        assert!(NoiseModel::new(NoiseKind::Shot { full_scale: 0 }, 0).is_err());
    }

    #[test]
    fn small_mean_poisson_moments() {
        let mut rng = Gaussian::new(17);
        let n = 50_000;
        let draws: Vec<f64> = (0..n).map(|_| poisson(3.5, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 3.5).abs() < 0.05, "{mean}");
        assert!((var - 3.5).abs() < 0.15, "{var}");
    }

    #[test]
    fn reproducible_from_seed() {
        let y = set((0..32).map(|i| i as f64 / 32.0).collect());
        let m = NoiseModel::new(NoiseKind::Gaussian { sigma: 0.05 }, 12).unwrap();
        assert_eq!(inject_noise(&y, &m).unwrap(), inject_noise(&y, &m).unwrap());
        assert_ne!(inject_noise(&y, &m).unwrap(), inject_noise(&y, &m.with_seed(13)).unwrap());
    }
}
