use super::forward::{adjoint, forward};
use crate::cube::{CodedAperture, HyperCube, SensingConfig};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Power iteration on `Phi^T Phi` from a seeded start. Returns the sequence
/// of estimates `||Phi v_k||` for unit `v_k`, which is non-decreasing.
pub fn operator_norm_trace(
    apertures: &[CodedAperture],
    config: &SensingConfig,
    iters: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if iters == 0 {
        return Err(Error::InvalidParameter("power iteration needs at least one step".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut v = HyperCube::from_fn(config.bands, config.height, config.width, |_, _, _| {
        rng.next_f64() - 0.5
    });
    normalize(&mut v);
    let mut estimates = Vec::with_capacity(iters);
    for _ in 0..iters {
        let y = forward(&v, apertures, config)?;
        let energy: f64 = y.iter().flat_map(|s| s.data()).map(|a| a * a).sum();
        estimates.push(energy.sqrt());
        let mut next = adjoint(&y, apertures, config)?;
        if normalize(&mut next) == 0.0 {
            break;
        }
        v = next;
    }
    Ok(estimates)
}

/// Estimate of the spectral norm `||Phi||_2`.
pub fn operator_norm(apertures: &[CodedAperture], config: &SensingConfig, iters: usize, seed: u64) -> Result<f64> {
    Ok(*operator_norm_trace(apertures, config, iters, seed)?
        .last()
        .expect("at least one estimate"))
}

fn normalize(v: &mut HyperCube) -> f64 {
    let norm = v.data().iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.data_mut().iter_mut().for_each(|a| *a /= norm);
    }
    norm
}
