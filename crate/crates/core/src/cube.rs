//! Domain types: sensing geometry, hyperspectral cubes, coded apertures and
//! coded snapshots.

use crate::error::{Error, Result};

/// Geometry of the sensing operator.
///
/// Band `c` (zero-based) is shifted by `c * step` columns, so a snapshot is
/// `height x (width + (bands - 1) * step)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SensingConfig {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub step: usize,
    pub shots: usize,
}

impl SensingConfig {
    pub fn new(height: usize, width: usize, bands: usize, step: usize, shots: usize) -> Result<Self> {
        if height == 0 || width == 0 || bands == 0 || shots == 0 {
            return Err(Error::InvalidParameter(format!(
                "height, width, bands and shots must be positive (got {height}x{width}x{bands}, {shots} shots)"
            )));
        }
        Ok(Self {
            height,
            width,
            bands,
            step,
            shots,
        })
    }

    pub fn with_shots(self, shots: usize) -> Result<Self> {
        Self::new(self.height, self.width, self.bands, self.step, shots)
    }

    pub fn measurement_width(&self) -> usize {
        self.width + (self.bands - 1) * self.step
    }

    /// Column offset of zero-based band `c`.
    pub fn shift(&self, c: usize) -> usize {
        c * self.step
    }

    pub fn cube_len(&self) -> usize {
        self.bands * self.height * self.width
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn measurement_len(&self) -> usize {
        self.height * self.measurement_width()
    }

    /// Number of bands whose shifted window covers measurement column `n`.
    pub fn column_coverage(&self, n: usize) -> usize {
        (0..self.bands)
            .filter(|&c| {
                let d = self.shift(c);
                n >= d && n < d + self.width
            })
            .count()
    }
}

fn check_finite(data: &[f64], what: &'static str) -> Result<()> {
    if data.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// A `bands x height x width` cube stored band-major: element `(c, h, w)`
/// lives at `((c * height) + h) * width + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    bands: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl HyperCube {
    pub fn zeros(bands: usize, height: usize, width: usize) -> Self {
        Self {
            bands,
            height,
            width,
            data: vec![0.0; bands * height * width],
        }
    }

    pub fn for_config(config: &SensingConfig) -> Self {
        Self::zeros(config.bands, config.height, config.width)
    }

    pub fn from_vec(bands: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != bands * height * width {
            return Err(Error::shape("cube data", bands * height * width, data.len()));
        }
        check_finite(&data, "cube")?;
        Ok(Self {
            bands,
            height,
            width,
            data,
        })
    }

    /// Builds a cube element-wise from `f(c, h, w)`.
    pub fn from_fn(
        bands: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(bands * height * width);
        for c in 0..bands {
            for h in 0..height {
                for w in 0..width {
                    data.push(f(c, h, w));
                }
            }
        }
        Self {
            bands,
            height,
            width,
            data,
        }
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.bands, self.height, self.width)
    }

    #[inline]
    pub fn index(&self, c: usize, h: usize, w: usize) -> usize {
        (c * self.height + h) * self.width + w
    }

    #[inline]
    pub fn get(&self, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.index(c, h, w)]
    }

    pub fn set(&mut self, c: usize, h: usize, w: usize, value: f64) {
        let i = self.index(c, h, w);
        self.data[i] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn band(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn band_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.height * self.width;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn check_config(&self, config: &SensingConfig) -> Result<()> {
        let expected = (config.bands, config.height, config.width);
        if self.dims() != expected {
            return Err(Error::shape("cube (bands, height, width)", expected, self.dims()));
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &HyperCube) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::shape("cube pair", self.dims(), other.dims()));
        }
        Ok(())
    }

    /// `self + other`, element-wise.
    pub fn add(&self, other: &HyperCube) -> Result<HyperCube> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self - other`, element-wise.
    pub fn sub(&self, other: &HyperCube) -> Result<HyperCube> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> HyperCube {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> HyperCube {
        HyperCube {
            bands: self.bands,
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &HyperCube, f: impl Fn(f64, f64) -> f64) -> Result<HyperCube> {
        self.check_same_shape(other)?;
        Ok(HyperCube {
            bands: self.bands,
            height: self.height,
            width: self.width,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn dot(&self, other: &HyperCube) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs_diff(&self, other: &HyperCube) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(max_abs_diff(&self.data, &other.data))
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApertureKind {
    Binary,
    Continuous,
}

/// A transmittance pattern in `[0, 1]`, row-major `height x width`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedAperture {
    height: usize,
    width: usize,
    kind: ApertureKind,
    data: Vec<f64>,
}

impl CodedAperture {
    pub fn new(height: usize, width: usize, kind: ApertureKind, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::shape("aperture data", height * width, data.len()));
        }
        check_finite(&data, "aperture")?;
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "aperture value {v} outside [0, 1]"
            )));
        }
        if kind == ApertureKind::Binary {
            if let Some(v) = data.iter().find(|&&v| v != 0.0 && v != 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "binary aperture holds non-binary value {v}"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            kind,
            data,
        })
    }

    /// Infers the kind: binary iff every value is exactly 0 or 1.
    pub fn from_values(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        let kind = if data.iter().all(|&v| v == 0.0 || v == 1.0) {
            ApertureKind::Binary
        } else {
            ApertureKind::Continuous
        };
        Self::new(height, width, kind, data)
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::from_values(height, width, vec![value; height * width])
    }

    pub fn ones(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            kind: ApertureKind::Binary,
            data: vec![1.0; height * width],
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> ApertureKind {
        self.kind
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, h: usize, w: usize) -> f64 {
        self.data[h * self.width + w]
    }

    pub fn check_config(&self, config: &SensingConfig) -> Result<()> {
        if (self.height, self.width) != (config.height, config.width) {
            return Err(Error::shape(
                "aperture (height, width)",
                (config.height, config.width),
                (self.height, self.width),
            ));
        }
        Ok(())
    }
}

/// One coded snapshot, `height x width` where `width` is the dispersed width.
/// `shot` is one-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    shot: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Measurement {
    pub fn new(shot: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if shot == 0 {
            return Err(Error::InvalidParameter("shot index is one-based".into()));
        }
        if data.len() != height * width {
            return Err(Error::shape("measurement data", height * width, data.len()));
        }
        check_finite(&data, "measurement")?;
        Ok(Self {
            shot,
            height,
            width,
            data,
        })
    }

    pub fn zeros(shot: usize, config: &SensingConfig) -> Self {
        Self {
            shot,
            height: config.height,
            width: config.measurement_width(),
            data: vec![0.0; config.measurement_len()],
        }
    }

    pub fn shot(&self) -> usize {
        self.shot
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.data[m * self.width + n]
    }

    pub fn with_shot(mut self, shot: usize) -> Result<Self> {
        if shot == 0 {
            return Err(Error::InvalidParameter("shot index is one-based".into()));
        }
        self.shot = shot;
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Measurement {
        Measurement {
            shot: self.shot,
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn check_config(&self, config: &SensingConfig) -> Result<()> {
        let expected = (config.height, config.measurement_width());
        if (self.height, self.width) != expected {
            return Err(Error::shape(
                "measurement (height, width)",
                expected,
                (self.height, self.width),
            ));
        }
        Ok(())
    }
}

/// The `N` snapshots of one acquisition, ordered by shot index.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    shots: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn new(shots: Vec<Measurement>) -> Result<Self> {
        if shots.is_empty() {
            return Err(Error::InvalidParameter("empty measurement set".into()));
        }
        let (h, w) = (shots[0].height, shots[0].width);
        for pair in shots.windows(2) {
            if pair[1].shot <= pair[0].shot {
                return Err(Error::InvalidParameter(
                    "shot indices must be distinct and increasing".into(),
                ));
            }
        }
        if let Some(bad) = shots.iter().find(|s| (s.height, s.width) != (h, w)) {
            return Err(Error::shape("measurement set member", (h, w), (bad.height, bad.width)));
        }
        Ok(Self { shots })
    }

    pub fn single(measurement: Measurement) -> Self {
        Self {
            shots: vec![measurement],
        }
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn shots(&self) -> &[Measurement] {
        &self.shots
    }

    pub fn get(&self, i: usize) -> &Measurement {
        &self.shots[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Measurement> {
        self.shots.iter()
    }

    pub fn into_vec(self) -> Vec<Measurement> {
        self.shots
    }

    pub fn push(&mut self, measurement: Measurement) -> Result<()> {
        let mut shots = std::mem::take(&mut self.shots);
        shots.push(measurement);
        *self = Self::new(shots)?;
        Ok(())
    }

    pub fn check_config(&self, config: &SensingConfig) -> Result<()> {
        if self.shots.len() != config.shots {
            return Err(Error::shape("number of shots", config.shots, self.shots.len()));
        }
        self.shots.iter().try_for_each(|s| s.check_config(config))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> MeasurementSet {
        MeasurementSet {
            shots: self.shots.iter().map(|s| s.map(f)).collect(),
        }
    }

    /// All values in shot order, one flat vector.
    pub fn stacked(&self) -> Vec<f64> {
        self.shots.iter().flat_map(|s| s.data.iter().copied()).collect()
    }

    pub fn max_abs_diff(&self, other: &MeasurementSet) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::shape("measurement set length", self.len(), other.len()));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.shots.iter().zip(&other.shots) {
            if (a.height, a.width) != (b.height, b.width) {
                return Err(Error::shape("measurement pair", (a.height, a.width), (b.height, b.width)));
            }
            worst = worst.max(max_abs_diff(&a.data, &b.data));
        }
        Ok(worst)
    }
}

impl<'a> IntoIterator for &'a MeasurementSet {
    type Item = &'a Measurement;
    type IntoIter = std::slice::Iter<'a, Measurement>;

    fn into_iter(self) -> Self::IntoIter {
        self.shots.iter()
    }
}
