//! Content-aware mask prediction from the previous snapshot.
//!
//! `M_i = clamp01(shared_i + eta_i * H(y_{i-1}))` where `H` is a fixed
//! three-layer filter bank followed by min–max normalization and a mean
//! over feature channels.

use crate::cube::{CodedAperture, Measurement, SensingConfig};
use crate::error::{Error, Result};

pub const DEFAULT_ETA: f64 = 0.1;

/// Odd-sized square correlation kernel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("kernel side {size} must be odd")));
        }
        if weights.len() != size * size {
            return Err(Error::shape("kernel weights", size * size, weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("kernel weights"));
        }
        Ok(Self { size, weights })
    }

    pub fn box_blur() -> Self {
        Self::new(3, vec![1.0 / 9.0; 9]).unwrap()
    }

    /// Horizontal, vertical and the two diagonal Sobel kernels, each scaled
    /// to unit L1 norm.
    pub fn sobel_family() -> [Kernel; 4] {
        let raw: [[f64; 9]; 4] = [
            [-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0],
            [-1.0, -2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0],
            [0.0, 1.0, 2.0, -1.0, 0.0, 1.0, -2.0, -1.0, 0.0],
            [-2.0, -1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 1.0, 2.0],
        ];
        raw.map(|k| Kernel::new(3, k.iter().map(|v| v / 8.0).collect()).unwrap())
    }

    /// Kernel equivalent to correlating with `first` and then with `second`
    /// (ignoring border effects).
    pub fn compose(first: &Kernel, second: &Kernel) -> Kernel {
        let size = first.size + second.size - 1;
        let mut weights = vec![0.0; size * size];
        for (i, a) in first.weights.iter().enumerate() {
            let (ai, aj) = (i / first.size, i % first.size);
            for (j, b) in second.weights.iter().enumerate() {
                let (bi, bj) = (j / second.size, j % second.size);
                weights[(ai + bi) * size + aj + bj] += a * b;
            }
        }
        Kernel { size, weights }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same-size correlation with zero padding.
    fn correlate(&self, field: &[f64], height: usize, width: usize) -> Vec<f64> {
        let r = (self.size / 2) as isize;
        let mut out = vec![0.0; field.len()];
        for h in 0..height as isize {
            for w in 0..width as isize {
                let mut acc = 0.0;
                for ki in -r..=r {
                    let hh = h + ki;
                    if hh < 0 || hh >= height as isize {
                        continue;
                    }
                    for kj in -r..=r {
                        let ww = w + kj;
                        if ww < 0 || ww >= width as isize {
                            continue;
                        }
                        let k = self.weights[((ki + r) as usize) * self.size + (kj + r) as usize];
                        acc += k * field[hh as usize * width + ww as usize];
                    }
                }
                out[h as usize * width + w as usize] = acc;
            }
        }
        out
    }
}

/// One convolution + rectification layer. With a single input channel every
/// kernel produces one output channel; otherwise kernel `k` filters input
/// channel `k` (depthwise).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    kernels: Vec<Kernel>,
}

impl ConvLayer {
    pub fn new(kernels: Vec<Kernel>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidParameter("convolution layer without kernels".into()));
        }
        Ok(Self { kernels })
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn out_channels(&self) -> usize {
        self.kernels.len()
    }

    fn apply(&self, input: &[Vec<f64>], height: usize, width: usize) -> Result<Vec<Vec<f64>>> {
        let relu = |v: Vec<f64>| v.into_iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
        match input.len() {
            1 => Ok(self
                .kernels
                .iter()
                .map(|k| relu(k.correlate(&input[0], height, width)))
                .collect()),
            n if n == self.kernels.len() => Ok(self
                .kernels
                .iter()
                .zip(input)
                .map(|(k, ch)| relu(k.correlate(ch, height, width)))
                .collect()),
            n => Err(Error::shape("layer input channels", self.kernels.len(), n)),
        }
    }
}

/// The default three-layer bank: box blur followed by the four edge
/// kernels (4 channels), then two per-channel box blurs.
pub fn default_filter_bank() -> Vec<ConvLayer> {
    let blur = Kernel::box_blur();
    let first = Kernel::sobel_family()
        .iter()
        .map(|edge| Kernel::compose(&blur, edge))
        .collect();
    vec![
        ConvLayer::new(first).unwrap(),
        ConvLayer::new(vec![blur.clone(); 4]).unwrap(),
        ConvLayer::new(vec![blur; 4]).unwrap(),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorConfig {
    shared: Vec<CodedAperture>,
    eta: Vec<f64>,
    layers: Vec<ConvLayer>,
}

impl PredictorConfig {
    /// `shared[i]` and `eta[i]` belong to shot `i + 1`; `shared[0]` is the
    /// first-shot mask used as is.
    pub fn new(shared: Vec<CodedAperture>, eta: Vec<f64>, layers: Vec<ConvLayer>) -> Result<Self> {
        if shared.is_empty() {
            return Err(Error::InvalidParameter("predictor needs at least one shared mask".into()));
        }
        if eta.len() != shared.len() {
            return Err(Error::shape("eta per shot", shared.len(), eta.len()));
        }
        if eta.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("eta"));
        }
        if layers.len() != 3 {
            return Err(Error::shape("filter bank layers", 3, layers.len()));
        }
        let (h, w) = (shared[0].height(), shared[0].width());
        if let Some(m) = shared.iter().find(|m| (m.height(), m.width()) != (h, w)) {
            return Err(Error::shape("shared mask", (h, w), (m.height(), m.width())));
        }
        Ok(Self { shared, eta, layers })
    }

    /// Default filter bank and uniform `eta` for every shot.
    pub fn with_defaults(shared: Vec<CodedAperture>, eta: f64) -> Result<Self> {
        let n = shared.len();
        Self::new(shared, vec![eta; n], default_filter_bank())
    }

    pub fn shots(&self) -> usize {
        self.shared.len()
    }

    pub fn shared(&self) -> &[CodedAperture] {
        &self.shared
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub fn set_eta(&mut self, eta: f64) {
        self.eta.iter_mut().for_each(|e| *e = eta);
    }
}

/// Average of the `C` dispersion-aligned windows of `y`, after removing
/// the snapshot minimum.
pub fn realign(measurement: &Measurement, config: &SensingConfig) -> Result<Vec<f64>> {
    measurement.check_config(config)?;
    let floor = measurement.data().iter().cloned().fold(f64::INFINITY, f64::min);
    let mut field = vec![0.0; config.plane_len()];
    for h in 0..config.height {
        for w in 0..config.width {
            let mut acc = 0.0;
            for c in 0..config.bands {
                acc += measurement.get(h, w + config.shift(c)) - floor;
            }
            field[h * config.width + w] = acc / config.bands as f64;
        }
    }
    Ok(field)
}

/// Content term `H(y)` in `[0, 1]`, `height x width`.
pub fn content_response(
    measurement: &Measurement,
    layers: &[ConvLayer],
    config: &SensingConfig,
) -> Result<Vec<f64>> {
    let (height, width) = (config.height, config.width);
    let mut features = vec![realign(measurement, config)?];
    for layer in layers {
        features = layer.apply(&features, height, width)?;
    }
    let (lo, hi) = features
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    let channels = features.len() as f64;
    Ok((0..height * width)
        .map(|p| {
            if span > 0.0 {
                features.iter().map(|f| (f[p] - lo) / span).sum::<f64>() / channels
            } else {
                0.5
            }
        })
        .collect())
}

/// Predicts the aperture of shot `shot` (one-based, at least 2) from the
/// snapshot of shot `shot - 1`.
pub fn predict_mask(
    prev: &Measurement,
    predictor: &PredictorConfig,
    shot: usize,
    config: &SensingConfig,
) -> Result<CodedAperture> {
    if shot < 2 {
        return Err(Error::InvalidParameter(
            "shot 1 has no previous measurement; its mask comes from the shot plan".into(),
        ));
    }
    if shot > predictor.shots() {
        return Err(Error::InvalidParameter(format!(
            "predictor configured for {} shots, asked for shot {shot}",
            predictor.shots()
        )));
    }
    let shared = &predictor.shared[shot - 1];
    shared.check_config(config)?;
    let eta = predictor.eta[shot - 1];
    let response = content_response(prev, &predictor.layers, config)?;
    let data = shared
        .data()
        .iter()
        .zip(&response)
        .map(|(m, r)| (m + eta * r).clamp(0.0, 1.0))
        .collect();
    CodedAperture::from_values(config.height, config.width, data)
}
