//! Shift-and-sum sensing and its transpose.

use rayon::prelude::*;

use super::kahan::Kahan;
use crate::cube::{CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};

pub(crate) fn check_apertures(apertures: &[CodedAperture], config: &SensingConfig) -> Result<()> {
    if apertures.is_empty() {
        return Err(Error::InvalidParameter("at least one aperture is required".into()));
    }
    apertures.iter().try_for_each(|a| a.check_config(config))
}

/// Modulates band `c` by `weight(c, h, w)`, shifts it by `c * step` columns
/// and sums over bands. Each output element accumulates bands in increasing
/// order with compensated summation.
pub(crate) fn shift_and_sum<F>(cube: &HyperCube, config: &SensingConfig, weight: F) -> Vec<f64>
where
    F: Fn(usize, usize, usize) -> f64 + Sync,
{
    let wm = config.measurement_width();
    let mut out = vec![0.0; config.measurement_len()];
    out.par_chunks_mut(wm).enumerate().for_each(|(m, row)| {
        for (n, slot) in row.iter_mut().enumerate() {
            let mut acc = Kahan::default();
            for c in 0..config.bands {
                let d = config.shift(c);
                if n >= d && n - d < config.width {
                    let w = n - d;
                    acc.add(weight(c, m, w) * cube.get(c, m, w));
                }
            }
            *slot = acc.value();
        }
    });
    out
}

/// Single-shot sensing `y = Phi_M x`.
pub fn forward_shot(
    cube: &HyperCube,
    aperture: &CodedAperture,
    config: &SensingConfig,
    shot: usize,
) -> Result<Measurement> {
    cube.check_config(config)?;
    aperture.check_config(config)?;
    let data = shift_and_sum(cube, config, |_, h, w| aperture.get(h, w));
    Measurement::new(shot, config.height, config.measurement_width(), data)
}

/// Multi-shot sensing: one snapshot per aperture, shot indices `1..=N`.
/// Noise-free; see [`crate::sampling::inject_noise`].
pub fn forward(
    cube: &HyperCube,
    apertures: &[CodedAperture],
    config: &SensingConfig,
) -> Result<MeasurementSet> {
    check_apertures(apertures, config)?;
    if apertures.len() != config.shots {
        return Err(Error::shape("number of apertures", config.shots, apertures.len()));
    }
    let shots = apertures
        .iter()
        .enumerate()
        .map(|(i, a)| forward_shot(cube, a, config, i + 1))
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(shots)
}

/// `Phi^T y`: `(Phi^T y)_c(m, n) = sum_i M_i(m, n) * y_i(m, n + d_c)`.
pub fn adjoint(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
) -> Result<HyperCube> {
    check_apertures(apertures, config)?;
    if measurements.len() != apertures.len() {
        return Err(Error::shape("measurements vs apertures", apertures.len(), measurements.len()));
    }
    measurements.iter().try_for_each(|y| y.check_config(config))?;
    let data = adjoint_raw(config, apertures.len(), |i, m, n| measurements.get(i).get(m, n), |i, h, w| {
        apertures[i].get(h, w)
    });
    Ok(HyperCube::from_vec(config.bands, config.height, config.width, data)
        .expect("adjoint output has config shape"))
}

/// Generic transpose of shift-and-sum over `shots` measurement planes with
/// per-shot, per-band weights `weight(i, h, w)` (band-independent) read
/// through `value(i, m, n)`.
pub(crate) fn adjoint_raw<V, W>(config: &SensingConfig, shots: usize, value: V, weight: W) -> Vec<f64>
where
    V: Fn(usize, usize, usize) -> f64 + Sync,
    W: Fn(usize, usize, usize) -> f64 + Sync,
{
    let width = config.width;
    let mut out = vec![0.0; config.cube_len()];
    out.par_chunks_mut(width).enumerate().for_each(|(row, slot)| {
        let c = row / config.height;
        let h = row % config.height;
        let d = config.shift(c);
        for (w, v) in slot.iter_mut().enumerate() {
            let mut acc = Kahan::default();
            for i in 0..shots {
                acc.add(weight(i, h, w) * value(i, h, w + d));
            }
            *v = acc.value();
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_band_unit_mask_is_identity() {
        let cfg = SensingConfig::new(3, 4, 1, 2, 1).unwrap();
        let cube = HyperCube::from_fn(1, 3, 4, |_, h, w| (h * 4 + w) as f64 * 0.1);
        let y = forward(&cube, &[CodedAperture::ones(3, 4)], &cfg).unwrap();
        assert_eq!(y.get(0).data(), cube.data());
        let back = adjoint(&y, &[CodedAperture::ones(3, 4)], &cfg).unwrap();
        assert_eq!(back, cube);
    }

    #[test]
    fn overlap_counting_row() {
        let cfg = SensingConfig::new(1, 4, 3, 2, 1).unwrap();
        let cube = HyperCube::from_fn(3, 1, 4, |_, _, _| 1.0);
        let y = forward(&cube, &[CodedAperture::ones(1, 4)], &cfg).unwrap();
        assert_eq!(y.get(0).data(), &[1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 1.0, 1.0]);
    }

    #[test]
    fn zero_measurements_give_zero_cube() {
        let cfg = SensingConfig::new(2, 3, 2, 1, 2).unwrap();
        let masks = vec![CodedAperture::ones(2, 3), CodedAperture::ones(2, 3)];
        let y = MeasurementSet::new(vec![Measurement::zeros(1, &cfg), Measurement::zeros(2, &cfg)]).unwrap();
        let x = adjoint(&y, &masks, &cfg).unwrap();
        assert!(x.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shape_mismatch_reported() {
        let cfg = SensingConfig::new(2, 3, 2, 1, 1).unwrap();
        let cube = HyperCube::zeros(2, 2, 4);
        let err = forward(&cube, &[CodedAperture::ones(2, 3)], &cfg).unwrap_err();
        assert!(err.to_string().contains("expected (2, 2, 3)"), "{err}");
        let cube = HyperCube::zeros(2, 2, 3);
        assert!(forward(&cube, &[CodedAperture::ones(2, 4)], &cfg).is_err());
        assert!(forward(&cube, &[], &cfg).is_err());
    }
}
