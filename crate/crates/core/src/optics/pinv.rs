//! Pseudo-inverses of the sensing operator and the range / null space
//! projectors built from them.

use super::forward::{adjoint_raw, check_apertures, forward, shift_and_sum};
use super::gram::{coverage_gram, GramField};
use crate::cube::{CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};

/// Floor applied to the rectification weights in [`EnhancedMode::Masked`].
pub const RECTIFY_FLOOR: f64 = 1e-3;

/// How [`EnhancedMask`] derives its rectification weights from an aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnhancedMode {
    /// `E_c = max(M, 1e-3)`.
    #[default]
    Masked,
    /// `E_c = 1`.
    Uniform,
}

/// Per-band modulation (`F`) and rectification (`E`) weights derived from
/// one physical aperture. `F_c = M` for every band.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedMask {
    bands: usize,
    height: usize,
    width: usize,
    modulation: Vec<f64>,
    rectification: Vec<f64>,
}

impl EnhancedMask {
    pub fn from_aperture(aperture: &CodedAperture, config: &SensingConfig, mode: EnhancedMode) -> Result<Self> {
        aperture.check_config(config)?;
        let plane = aperture.data();
        let modulation: Vec<f64> = (0..config.bands).flat_map(|_| plane.iter().copied()).collect();
        let rectification = match mode {
            EnhancedMode::Masked => modulation.iter().map(|&m| m.max(RECTIFY_FLOOR)).collect(),
            EnhancedMode::Uniform => vec![1.0; modulation.len()],
        };
        Ok(Self {
            bands: config.bands,
            height: config.height,
            width: config.width,
            modulation,
            rectification,
        })
    }

    /// Explicit weights, e.g. exported from a trained enhancement module.
    pub fn from_weights(config: &SensingConfig, modulation: Vec<f64>, rectification: Vec<f64>) -> Result<Self> {
        let len = config.cube_len();
        if modulation.len() != len || rectification.len() != len {
            return Err(Error::shape("enhanced mask weights", len, (modulation.len(), rectification.len())));
        }
        if rectification.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter("rectification weights must be positive".into()));
        }
        if modulation.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("modulation weights"));
        }
        Ok(Self {
            bands: config.bands,
            height: config.height,
            width: config.width,
            modulation,
            rectification,
        })
    }

    pub fn modulation(&self) -> &[f64] {
        &self.modulation
    }

    pub fn rectification(&self) -> &[f64] {
        &self.rectification
    }

    #[inline]
    fn at(&self, c: usize, h: usize, w: usize) -> usize {
        (c * self.height + h) * self.width + w
    }

    fn check_config(&self, config: &SensingConfig) -> Result<()> {
        let expected = (config.bands, config.height, config.width);
        if (self.bands, self.height, self.width) != expected {
            return Err(Error::shape("enhanced mask", expected, (self.bands, self.height, self.width)));
        }
        Ok(())
    }
}

/// Shift-and-sum with per-band modulation weights `F`.
pub fn modulated_forward(
    cube: &HyperCube,
    enhanced: &EnhancedMask,
    config: &SensingConfig,
    shot: usize,
) -> Result<Measurement> {
    cube.check_config(config)?;
    enhanced.check_config(config)?;
    let data = shift_and_sum(cube, config, |c, h, w| enhanced.modulation[enhanced.at(c, h, w)]);
    Measurement::new(shot, config.height, config.measurement_width(), data)
}

/// Per-column averaging weights: `1 / (number of bands covering column n)`,
/// zero for uncovered columns.
pub fn coverage_weights(config: &SensingConfig) -> Vec<f64> {
    (0..config.measurement_width())
        .map(|n| match config.column_coverage(n) {
            0 => 0.0,
            k => 1.0 / k as f64,
        })
        .collect()
}

/// Rectify, crop and slide: scales each measurement column by its coverage
/// weight, cuts out the window of every band and divides by `E`.
pub fn pinv_appendix(measurement: &Measurement, enhanced: &EnhancedMask, config: &SensingConfig) -> Result<HyperCube> {
    measurement.check_config(config)?;
    enhanced.check_config(config)?;
    let alpha = coverage_weights(config);
    let cube = HyperCube::from_fn(config.bands, config.height, config.width, |c, h, w| {
        let n = w + config.shift(c);
        measurement.get(h, n) * alpha[n] / enhanced.rectification[enhanced.at(c, h, w)]
    });
    Ok(cube)
}

/// `Phi^T (Phi Phi^T)^+` for a fixed set of apertures, with the per-pixel
/// Gram pseudo-inverses cached so it can be applied repeatedly.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    config: SensingConfig,
    apertures: Vec<CodedAperture>,
    gram: GramField,
    gram_pinv: Vec<f64>,
    rcond: f64,
}

impl PseudoInverse {
    pub fn new(apertures: &[CodedAperture], config: &SensingConfig, rcond: f64) -> Result<Self> {
        if !(rcond >= 0.0 && rcond.is_finite()) {
            return Err(Error::InvalidParameter(format!("rcond must be non-negative, got {rcond}")));
        }
        check_apertures(apertures, config)?;
        let config = config.with_shots(apertures.len())?;
        let gram = coverage_gram(apertures, &config)?;
        let gram_pinv = gram.pseudo_inverse(rcond);
        Ok(Self {
            config,
            apertures: apertures.to_vec(),
            gram,
            gram_pinv,
            rcond,
        })
    }

    pub fn config(&self) -> &SensingConfig {
        &self.config
    }

    pub fn apertures(&self) -> &[CodedAperture] {
        &self.apertures
    }

    pub fn gram(&self) -> &GramField {
        &self.gram
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Whether the Gram block at measurement pixel `(m, n)` is invertible
    /// under the rcond threshold.
    pub fn is_covered(&self, m: usize, n: usize) -> bool {
        let shots = self.config.shots;
        let block = self.gram.block(m, n);
        let pinv = self.pinv_block(m, n);
        // G G^+ = I exactly when G is nonsingular
        (0..shots).all(|i| {
            (0..shots).all(|j| {
                let v: f64 = (0..shots).map(|k| block[i * shots + k] * pinv[k * shots + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                (v - target).abs() < 1e-6
            })
        })
    }

    /// Mask over measurement pixels, row-major `height x measurement_width`.
    pub fn coverage_mask(&self) -> Vec<bool> {
        let wm = self.config.measurement_width();
        (0..self.config.height)
            .flat_map(|m| (0..wm).map(move |n| (m, n)))
            .map(|(m, n)| self.is_covered(m, n))
            .collect()
    }

    fn pinv_block(&self, m: usize, n: usize) -> &[f64] {
        let nn = self.config.shots * self.config.shots;
        let p = m * self.config.measurement_width() + n;
        &self.gram_pinv[p * nn..(p + 1) * nn]
    }

    pub fn apply(&self, measurements: &MeasurementSet) -> Result<HyperCube> {
        measurements.check_config(&self.config)?;
        let shots = self.config.shots;
        let wm = self.config.measurement_width();
        // u(m, n) = G^+(m, n) y(m, n), stored shot-major
        let plane = self.config.measurement_len();
        let mut u = vec![0.0; shots * plane];
        for m in 0..self.config.height {
            for n in 0..wm {
                let g = self.pinv_block(m, n);
                for i in 0..shots {
                    let mut acc = 0.0;
                    for j in 0..shots {
                        acc += g[i * shots + j] * measurements.get(j).get(m, n);
                    }
                    u[i * plane + m * wm + n] = acc;
                }
            }
        }
        let data = adjoint_raw(
            &self.config,
            shots,
            |i, m, n| u[i * plane + m * wm + n],
            |i, h, w| self.apertures[i].get(h, w),
        );
        HyperCube::from_vec(self.config.bands, self.config.height, self.config.width, data)
    }

    /// `P_r x = Phi^+ Phi x`.
    pub fn project_range(&self, cube: &HyperCube) -> Result<HyperCube> {
        let y = forward(cube, &self.apertures, &self.config)?;
        self.apply(&y)
    }

    /// `P_n x = x - P_r x`.
    pub fn project_null(&self, cube: &HyperCube) -> Result<HyperCube> {
        cube.sub(&self.project_range(cube)?)
    }
}

/// Exact Moore–Penrose pseudo-inverse `Phi^+ y = Phi^T G^+ y`.
pub fn pinv_exact(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    rcond: f64,
) -> Result<HyperCube> {
    PseudoInverse::new(apertures, config, rcond)?.apply(measurements)
}

pub fn project_range(cube: &HyperCube, apertures: &[CodedAperture], config: &SensingConfig, rcond: f64) -> Result<HyperCube> {
    PseudoInverse::new(apertures, config, rcond)?.project_range(cube)
}

pub fn project_null(cube: &HyperCube, apertures: &[CodedAperture], config: &SensingConfig, rcond: f64) -> Result<HyperCube> {
    PseudoInverse::new(apertures, config, rcond)?.project_null(cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::DEFAULT_RCOND;

    #[test]
    fn coverage_weights_step_two() {
        let cfg = SensingConfig::new(1, 4, 3, 2, 1).unwrap();
        assert_eq!(coverage_weights(&cfg), vec![1.0, 1.0, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0]);
    }

    #[test]
    fn uncovered_columns_get_zero_weight() {
        let cfg = SensingConfig::new(1, 2, 2, 3, 1).unwrap();
        assert_eq!(coverage_weights(&cfg), vec![1.0, 1.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn appendix_single_band_identity() {
        let cfg = SensingConfig::new(2, 3, 1, 2, 1).unwrap();
        let y = Measurement::new(1, 2, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let e = EnhancedMask::from_aperture(&CodedAperture::ones(2, 3), &cfg, EnhancedMode::Uniform).unwrap();
        let x = pinv_appendix(&y, &e, &cfg).unwrap();
        assert_eq!(x.data(), y.data());
    }

    #[test]
    fn exact_single_band_identity() {
        let cfg = SensingConfig::new(2, 3, 1, 0, 1).unwrap();
        let y = Measurement::new(1, 2, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        let x = pinv_exact(&MeasurementSet::single(y.clone()), &[CodedAperture::ones(2, 3)], &cfg, DEFAULT_RCOND).unwrap();
        assert_eq!(x.data(), y.data());
    }

    #[test]
    fn rectification_floor() {
        let cfg = SensingConfig::new(1, 2, 2, 1, 1).unwrap();
        let m = CodedAperture::from_values(1, 2, vec![0.0, 0.5]).unwrap();
        let e = EnhancedMask::from_aperture(&m, &cfg, EnhancedMode::Masked).unwrap();
        assert_eq!(e.rectification(), &[RECTIFY_FLOOR, 0.5, RECTIFY_FLOOR, 0.5]);
        assert_eq!(e.modulation(), &[0.0, 0.5, 0.0, 0.5]);
    }

    #[test]
    fn zero_coverage_pixels_are_zeroed() {
        let cfg = SensingConfig::new(1, 2, 1, 0, 1).unwrap();
        let m = CodedAperture::from_values(1, 2, vec![0.0, 1.0]).unwrap();
        let y = Measurement::new(1, 1, 2, vec![3.0, 4.0]).unwrap();
        let p = PseudoInverse::new(&[m], &cfg, DEFAULT_RCOND).unwrap();
        assert_eq!(p.apply(&MeasurementSet::single(y)).unwrap().data(), &[0.0, 4.0]);
        assert_eq!(p.coverage_mask(), vec![false, true]);
    }
}
