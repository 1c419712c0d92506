//! Report writers: metrics CSV rows and 16-bit PGM band images.

use std::fs;
use std::path::Path;

use crate::cube::HyperCube;
use crate::error::{Error, Result};
use crate::metrics::QualityReport;

pub const METRICS_HEADER: &str = "scene,algorithm,shots,K,mse,psnr_cube,psnr_band_mean,ssim";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub scene: String,
    pub algorithm: String,
    pub shots: usize,
    pub phases: usize,
    pub quality: QualityReport,
}

impl MetricsRow {
    /// CSV fields in header order. Infinite PSNR is `inf`; an SSIM that
    /// could not be computed is an empty field.
    pub fn fields(&self) -> [String; 8] {
        let q = &self.quality;
        [
            self.scene.clone(),
            self.algorithm.clone(),
            self.shots.to_string(),
            self.phases.to_string(),
            q.mse.to_string(),
            q.psnr_cube.to_string(),
            q.psnr_band_mean.to_string(),
            q.ssim_band_mean.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }

    /// One CSV record without the trailing newline.
    pub fn to_csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.fields()).expect("in-memory write");
        let mut line = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
        line.pop();
        line
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = format!("{METRICS_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Binary PGM (P5, maxval 65535) of one band, `[0, 1]` mapped linearly.
pub fn band_pgm(cube: &HyperCube, band: usize) -> Vec<u8> {
    let (h, w) = (cube.height(), cube.width());
    let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
    out.reserve(2 * h * w);
    for &v in cube.band(band) {
        let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}
