//! Per-pixel Gram matrices of the stacked sensing operator.
//!
//! Rows of `Phi` for different measurement pixels never share a cube entry,
//! so `Phi Phi^T` is block diagonal with one `N x N` block per measurement
//! pixel `(m, n)`.

use rayon::prelude::*;

use super::forward::check_apertures;
use super::kahan::Kahan;
use crate::cube::{CodedAperture, SensingConfig};
use crate::error::Result;

pub const DEFAULT_RCOND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GramField {
    config: SensingConfig,
    shots: usize,
    /// `height x measurement_width x shots x shots`, row-major.
    data: Vec<f64>,
}

impl GramField {
    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn config(&self) -> &SensingConfig {
        &self.config
    }

    /// The `N x N` block at measurement pixel `(m, n)`, row-major.
    pub fn block(&self, m: usize, n: usize) -> &[f64] {
        let nn = self.shots * self.shots;
        let p = m * self.config.measurement_width() + n;
        &self.data[p * nn..(p + 1) * nn]
    }

    pub fn entry(&self, m: usize, n: usize, i: usize, j: usize) -> f64 {
        self.block(m, n)[i * self.shots + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Per-pixel Moore–Penrose inverses, same layout as the field.
    pub(crate) fn pseudo_inverse(&self, rcond: f64) -> Vec<f64> {
        let nn = self.shots * self.shots;
        let mut out = vec![0.0; self.data.len()];
        out.par_chunks_mut(nn)
            .zip(self.data.par_chunks(nn))
            .for_each(|(dst, src)| symmetric_pinv(src, self.shots, rcond, dst));
        out
    }
}

/// `G_ij(m, n) = sum_c M_i(m, n - d_c) * M_j(m, n - d_c)` over in-range columns.
pub fn coverage_gram(apertures: &[CodedAperture], config: &SensingConfig) -> Result<GramField> {
    check_apertures(apertures, config)?;
    let shots = apertures.len();
    let nn = shots * shots;
    let wm = config.measurement_width();
    let mut data = vec![0.0; config.measurement_len() * nn];
    data.par_chunks_mut(wm * nn).enumerate().for_each(|(m, row)| {
        for n in 0..wm {
            let block = &mut row[n * nn..(n + 1) * nn];
            for i in 0..shots {
                for j in i..shots {
                    let mut acc = Kahan::default();
                    for c in 0..config.bands {
                        let d = config.shift(c);
                        if n >= d && n - d < config.width {
                            let w = n - d;
                            acc.add(apertures[i].get(m, w) * apertures[j].get(m, w));
                        }
                    }
                    block[i * shots + j] = acc.value();
                    block[j * shots + i] = acc.value();
                }
            }
        }
    });
    Ok(GramField {
        config: config.with_shots(shots)?,
        shots,
        data,
    })
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Returns eigenvalues and column-major eigenvectors (`vecs[k * n + i]` is
/// component `i` of eigenvector `k`).
pub(crate) fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * scale * 1e-3 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    // transpose to eigenvector-major
    let mut vecs = vec![0.0; n * n];
    for k in 0..n {
        for i in 0..n {
            vecs[k * n + i] = v[i * n + k];
        }
    }
    (values, vecs)
}

/// Moore–Penrose inverse of a symmetric PSD block: eigenvalues at or below
/// `rcond * lambda_max` are treated as zero.
pub(crate) fn symmetric_pinv(a: &[f64], n: usize, rcond: f64, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    if n == 1 {
        if a[0] > 0.0 {
            out[0] = 1.0 / a[0];
        }
        return;
    }
    let (values, vecs) = symmetric_eigen(a, n);
    let lmax = values.iter().cloned().fold(0.0, f64::max);
    if lmax <= 0.0 {
        return;
    }
    let cutoff = rcond * lmax;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let vk = &vecs[k * n..(k + 1) * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] += vk[i] * vk[j] / lambda;
            }
        }
    }
}
