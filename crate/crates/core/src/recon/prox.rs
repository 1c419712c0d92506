//! Proximal operators for the regularizer, with isotropic total variation
//! solved by Chambolle's dual projection.

use std::fmt::Debug;

use rayon::prelude::*;

use crate::cube::HyperCube;

pub const DEFAULT_TV_ITERATIONS: usize = 50;
const CHAMBOLLE_STEP: f64 = 0.25;

/// A denoiser standing in for `prox_{strength * psi}`. Implementations must
/// preserve the cube shape and return the input unchanged at strength 0.
pub trait ProxOperator: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Human-readable parameter record, e.g. for reports.
    fn params(&self) -> String {
        String::new()
    }

    fn apply(&self, z: &HyperCube, strength: f64) -> HyperCube;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityProx;

impl ProxOperator for IdentityProx {
    fn name(&self) -> &str {
        "identity"
    }

    fn apply(&self, z: &HyperCube, _strength: f64) -> HyperCube {
        z.clone()
    }
}

/// Per-band isotropic TV denoising with a fixed inner iteration count.
#[derive(Debug, Clone, Copy)]
pub struct TvProx {
    pub iterations: usize,
}

impl Default for TvProx {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_TV_ITERATIONS,
        }
    }
}

impl ProxOperator for TvProx {
    fn name(&self) -> &str {
        "tv_chambolle"
    }

    fn params(&self) -> String {
        format!("iterations={}", self.iterations)
    }

    fn apply(&self, z: &HyperCube, strength: f64) -> HyperCube {
        tv_denoise(z, strength, self.iterations)
    }
}

/// Forward differences along rows (`gv`) and columns (`gh`), zero on the
/// last row / column.
fn gradient(u: &[f64], height: usize, width: usize, gv: &mut [f64], gh: &mut [f64]) {
    for i in 0..height {
        for j in 0..width {
            let p = i * width + j;
            gv[p] = if i + 1 < height { u[p + width] - u[p] } else { 0.0 };
            gh[p] = if j + 1 < width { u[p + 1] - u[p] } else { 0.0 };
        }
    }
}

/// Negative adjoint of [`gradient`].
fn divergence(pv: &[f64], ph: &[f64], height: usize, width: usize, out: &mut [f64]) {
    for i in 0..height {
        for j in 0..width {
            let p = i * width + j;
            let dv = if height == 1 {
                0.0
            } else if i == 0 {
                pv[p]
            } else if i + 1 == height {
                -pv[p - width]
            } else {
                pv[p] - pv[p - width]
            };
            let dh = if width == 1 {
                0.0
            } else if j == 0 {
                ph[p]
            } else if j + 1 == width {
                -ph[p - 1]
            } else {
                ph[p] - ph[p - 1]
            };
            out[p] = dv + dh;
        }
    }
}

/// Isotropic total variation of one band.
pub fn tv_band(u: &[f64], height: usize, width: usize) -> f64 {
    let mut gv = vec![0.0; u.len()];
    let mut gh = vec![0.0; u.len()];
    gradient(u, height, width, &mut gv, &mut gh);
    gv.iter().zip(&gh).map(|(a, b)| (a * a + b * b).sqrt()).sum()
}

/// Sum of per-band isotropic TV.
pub fn tv_norm(cube: &HyperCube) -> f64 {
    (0..cube.bands())
        .map(|c| tv_band(cube.band(c), cube.height(), cube.width()))
        .sum()
}

fn chambolle_band(z: &[f64], height: usize, width: usize, lambda: f64, iterations: usize) -> Vec<f64> {
    let n = z.len();
    let mut pv = vec![0.0; n];
    let mut ph = vec![0.0; n];
    let mut div = vec![0.0; n];
    let mut term = vec![0.0; n];
    let mut gv = vec![0.0; n];
    let mut gh = vec![0.0; n];
    for _ in 0..iterations {
        divergence(&pv, &ph, height, width, &mut div);
        for p in 0..n {
            term[p] = div[p] - z[p] / lambda;
        }
        gradient(&term, height, width, &mut gv, &mut gh);
        for p in 0..n {
            let norm = (gv[p] * gv[p] + gh[p] * gh[p]).sqrt();
            let denom = 1.0 + CHAMBOLLE_STEP * norm;
            pv[p] = (pv[p] + CHAMBOLLE_STEP * gv[p]) / denom;
            ph[p] = (ph[p] + CHAMBOLLE_STEP * gh[p]) / denom;
        }
    }
    divergence(&pv, &ph, height, width, &mut div);
    z.iter().zip(&div).map(|(zi, d)| zi - lambda * d).collect()
}

/// Solves `min_u 1/2 ||u - z||^2 + strength * TV(u)` band by band.
pub fn tv_denoise(cube: &HyperCube, strength: f64, iterations: usize) -> HyperCube {
    if strength <= 0.0 || iterations == 0 {
        return cube.clone();
    }
    let (bands, height, width) = cube.dims();
    let plane = height * width;
    let mut out = HyperCube::zeros(bands, height, width);
    out.data_mut()
        .par_chunks_mut(plane)
        .enumerate()
        .for_each(|(c, dst)| {
            dst.copy_from_slice(&chambolle_band(cube.band(c), height, width, strength, iterations));
        });
    out
}

/// `1/2 ||u - z||^2 + strength * TV(u)`.
pub fn tv_prox_objective(u: &HyperCube, z: &HyperCube, strength: f64) -> f64 {
    let fit: f64 = u.data().iter().zip(z.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * fit + strength * tv_norm(u)
}
