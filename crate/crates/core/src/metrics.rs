//! MSE, PSNR and SSIM for hyperspectral cubes.
//!
//! PSNR uses peak 1.0 by default and is reported both over the whole cube
//! and as a mean of per-band values. SSIM is computed per band with an
//! 11x11 Gaussian window (sigma 1.5) over fully interior window positions.

use crate::cube::HyperCube;
use crate::error::{Error, Result};

pub const DEFAULT_PEAK: f64 = 1.0;
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

pub fn mse(a: &HyperCube, b: &HyperCube) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(mse_slice(a.data(), b.data()))
}

fn mse_slice(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    sum / a.len() as f64
}

/// `10 log10(peak^2 / mse)`; infinite when the MSE is zero.
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

pub fn psnr(a: &HyperCube, b: &HyperCube, peak: f64) -> Result<f64> {
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::InvalidParameter(format!("peak must be positive, got {peak}")));
    }
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

pub fn psnr_per_band(a: &HyperCube, b: &HyperCube, peak: f64) -> Result<Vec<f64>> {
    a.check_same_shape(b)?;
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::InvalidParameter(format!("peak must be positive, got {peak}")));
    }
    Ok((0..a.bands())
        .map(|c| psnr_from_mse(mse_slice(a.band(c), b.band(c)), peak))
        .collect())
}

fn gaussian_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let g: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| (-(i as f64 - r).powi(2) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let total: f64 = g.iter().sum();
    let g: Vec<f64> = g.iter().map(|v| v / total).collect();
    g.iter().flat_map(|a| g.iter().map(move |b| a * b)).collect()
}

fn ssim_band(a: &[f64], b: &[f64], height: usize, width: usize, window: &[f64]) -> f64 {
    let c1 = (SSIM_K1 * DEFAULT_PEAK).powi(2);
    let c2 = (SSIM_K2 * DEFAULT_PEAK).powi(2);
    let mut total = 0.0;
    let mut count = 0usize;
    for top in 0..=height - SSIM_WINDOW {
        for left in 0..=width - SSIM_WINDOW {
            let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..SSIM_WINDOW {
                for j in 0..SSIM_WINDOW {
                    let g = window[i * SSIM_WINDOW + j];
                    let p = (top + i) * width + left + j;
                    let (x, y) = (a[p], b[p]);
                    ma += g * x;
                    mb += g * y;
                    saa += g * x * x;
                    sbb += g * y * y;
                    sab += g * x * y;
                }
            }
            let var_a = saa - ma * ma;
            let var_b = sbb - mb * mb;
            let cov = sab - ma * mb;
            let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
            let den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
            total += num / den;
            count += 1;
        }
    }
    total / count as f64
}

/// Per-band SSIM values and their mean.
pub fn ssim(a: &HyperCube, b: &HyperCube) -> Result<(Vec<f64>, f64)> {
    a.check_same_shape(b)?;
    if a.height() < SSIM_WINDOW || a.width() < SSIM_WINDOW {
        return Err(Error::InvalidParameter(format!(
            "SSIM needs bands of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {}x{}",
            a.height(),
            a.width()
        )));
    }
    let window = gaussian_window();
    let per_band: Vec<f64> = (0..a.bands())
        .map(|c| ssim_band(a.band(c), b.band(c), a.height(), a.width(), &window))
        .collect();
    let mean = per_band.iter().sum::<f64>() / per_band.len() as f64;
    Ok((per_band, mean))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_cube: f64,
    pub psnr_band_mean: f64,
    /// `None` when bands are smaller than the SSIM window.
    pub ssim_band_mean: Option<f64>,
    pub psnr_bands: Vec<f64>,
    pub ssim_bands: Vec<f64>,
}

/// Scores `estimate` against `reference` with peak 1.
pub fn quality_report(reference: &HyperCube, estimate: &HyperCube) -> Result<QualityReport> {
    let mse = mse(reference, estimate)?;
    let psnr_bands = psnr_per_band(reference, estimate, DEFAULT_PEAK)?;
    let psnr_band_mean = psnr_bands.iter().sum::<f64>() / psnr_bands.len() as f64;
    let (ssim_bands, ssim_band_mean) = match ssim(reference, estimate) {
        Ok((bands, mean)) => (bands, Some(mean)),
        Err(Error::InvalidParameter(_)) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    Ok(QualityReport {
        mse,
        psnr_cube: psnr_from_mse(mse, DEFAULT_PEAK),
        psnr_band_mean,
        ssim_band_mean,
        psnr_bands,
        ssim_bands,
    })
}
