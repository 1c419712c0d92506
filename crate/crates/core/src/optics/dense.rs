//! Explicit matrix form of the stacked sensing operator, used as an
//! independent oracle for the matrix-free code paths.

use nalgebra::DMatrix;

use super::forward::check_apertures;
use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};

pub const DEFAULT_ORACLE_CAP: usize = 10_000_000;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension");
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "transpose matvec dimension");
        let mut out = vec![0.0; self.cols];
        for (row, &s) in self.data.chunks(self.cols).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * s;
            }
        }
        out
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    /// SVD-based Moore–Penrose inverse; singular values at or below
    /// `rel_tol * sigma_max` are dropped.
    pub fn pseudo_inverse(&self, rel_tol: f64) -> DenseMatrix {
        let svd = self.to_nalgebra().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let u = svd.u.as_ref().expect("u requested");
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let mut pinv = DMatrix::<f64>::zeros(self.cols, self.rows);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= rel_tol * smax || s == 0.0 {
                continue;
            }
            let v = vt.row(k).transpose();
            let uk = u.column(k);
            pinv += (v * uk.transpose()) / s;
        }
        Self::from_nalgebra(&pinv)
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.to_nalgebra()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        Self::from_nalgebra(&(self.to_nalgebra() * other.to_nalgebra()))
    }
}

/// Builds `Phi` with columns ordered `((c * H) + h) * W + w` and rows ordered
/// shot-major, then measurement pixel row-major.
pub fn build_dense_phi(apertures: &[CodedAperture], config: &SensingConfig, cap: usize) -> Result<DenseMatrix> {
    check_apertures(apertures, config)?;
    let shots = apertures.len();
    let rows = shots * config.measurement_len();
    let cols = config.cube_len();
    let entries = rows.saturating_mul(cols);
    if entries > cap {
        return Err(Error::OracleCap { rows, cols, entries, cap });
    }
    let wm = config.measurement_width();
    let mut phi = DenseMatrix::zeros(rows, cols);
    for (i, mask) in apertures.iter().enumerate() {
        for c in 0..config.bands {
            let d = config.shift(c);
            for h in 0..config.height {
                for w in 0..config.width {
                    let row = i * config.measurement_len() + h * wm + w + d;
                    let col = (c * config.height + h) * config.width + w;
                    phi.data[row * cols + col] = mask.get(h, w);
                }
            }
        }
    }
    Ok(phi)
}

/// Reshapes a stacked measurement vector into a [`MeasurementSet`].
pub fn unstack(values: &[f64], config: &SensingConfig) -> Result<MeasurementSet> {
    let plane = config.measurement_len();
    if !values.len().is_multiple_of(plane) || values.is_empty() {
        return Err(Error::shape("stacked measurements", plane, values.len()));
    }
    let shots = values
        .chunks(plane)
        .enumerate()
        .map(|(i, chunk)| {
            crate::cube::Measurement::new(i + 1, config.height, config.measurement_width(), chunk.to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(shots)
}

pub fn cube_from_vec(values: Vec<f64>, config: &SensingConfig) -> Result<HyperCube> {
    HyperCube::from_vec(config.bands, config.height, config.width, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_band_ones_is_identity() {
        let cfg = SensingConfig::new(2, 3, 1, 1, 1).unwrap();
        let phi = build_dense_phi(&[CodedAperture::ones(2, 3)], &cfg, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(phi, DenseMatrix::identity(6));
    }

    #[test]
    fn shape_arithmetic() {
        let cfg = SensingConfig::new(3, 4, 2, 2, 2).unwrap();
        let masks = vec![CodedAperture::ones(3, 4); 2];
        let phi = build_dense_phi(&masks, &cfg, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(phi.rows(), 2 * 3 * (4 + 2));
        assert_eq!(phi.cols(), 2 * 3 * 4);
    }

    #[test]
    fn cap_refusal() {
        let cfg = SensingConfig::new(3, 4, 2, 2, 1).unwrap();
        let err = build_dense_phi(&[CodedAperture::ones(3, 4)], &cfg, 10).unwrap_err();
        assert!(matches!(err, Error::OracleCap { rows: 18, cols: 24, .. }));
    }
}
