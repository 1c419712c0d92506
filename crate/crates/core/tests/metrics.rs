mod common;

use cassi::metrics::{mse, psnr, psnr_from_mse, psnr_per_band, quality_report, ssim};
use cassi::{HyperCube, SensingConfig};
use common::*;

fn constant(bands: usize, side: usize, v: f64) -> HyperCube {
    HyperCube::from_fn(bands, side, side, |_, _, _| v)
}

#[test]
fn mse_cases() {
    let cfg = SensingConfig::new(16, 16, 3, 1, 1).unwrap();
    let a = uniform_cube(&cfg, 1);
    assert_eq!(mse(&a, &a).unwrap(), 0.0);
    let shifted = a.map(|v| v + 0.1);
    assert!((mse(&a, &shifted).unwrap() - 0.01).abs() < 1e-15);

    let b = uniform_cube(&cfg, 2);
    let reversed: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .rev()
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.data().len() as f64;
    assert!((mse(&a, &b).unwrap() - reversed).abs() <= 1e-12);
}

#[test]
fn psnr_cases() {
    assert!((psnr_from_mse(0.01, 1.0) - 20.0).abs() < 1e-12);
    assert!((psnr_from_mse(1e-4, 1.0) - 40.0).abs() < 1e-12);
    let a = constant(2, 12, 0.3);
    assert_eq!(psnr(&a, &a, 1.0).unwrap(), f64::INFINITY);
    let b = constant(2, 12, 0.4);
    let bands = psnr_per_band(&a, &b, 1.0).unwrap();
    assert!(bands.iter().all(|p| (p - 20.0).abs() < 1e-9));
}

#[test]
fn ssim_cases() {
    let cfg = SensingConfig::new(16, 16, 2, 1, 1).unwrap();
    let a = uniform_cube(&cfg, 3);
    let b = uniform_cube(&cfg, 4);
    assert_eq!(ssim(&a, &a).unwrap().1, 1.0);
    assert!((ssim(&a, &b).unwrap().1 - ssim(&b, &a).unwrap().1).abs() < 1e-15);

    let c1 = (0.01f64).powi(2);
    let expected = (2.0 * 0.5 * 0.25 + c1) / (0.25 + 0.0625 + c1);
    let got = ssim(&constant(1, 16, 0.5), &constant(1, 16, 0.25)).unwrap().1;
    assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");

    assert!(ssim(&constant(1, 8, 0.5), &constant(1, 8, 0.5)).is_err());
}

#[test]
fn report_collects_everything() {
    let cfg = SensingConfig::new(12, 12, 3, 1, 1).unwrap();
    let a = uniform_cube(&cfg, 5);
    let b = a.map(|v| v * 0.9);
    let q = quality_report(&a, &b).unwrap();
    assert_eq!(q.psnr_bands.len(), 3);
    assert_eq!(q.ssim_bands.len(), 3);
    assert!((q.psnr_cube - psnr_from_mse(q.mse, 1.0)).abs() < 1e-12);
    assert!(q.ssim_band_mean.unwrap() < 1.0);
}
