//! The HSC1 binary container.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic    4 bytes  "HSC1"
//! version  u32      1
//! kind     u8       0 = cube, 1 = aperture, 2 = measurement
//! dtype    u8       0 = f32, 1 = f64
//! rank     u8       2 or 3
//! reserved u8       0
//! dims     rank x u32   (cube: C, H, W; 2D: H, W; measurement stack: N, H, W)
//! payload  prod(dims) values in linear (row-major) order
//! ```
//!
//! A rank-3 measurement file holds a whole shot stack; a rank-2 one holds a
//! single snapshot, read back as shot 1.

use std::fs;
use std::path::Path;

use crate::cube::{CodedAperture, HyperCube, Measurement, MeasurementSet};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"HSC1";
pub const VERSION: u32 = 1;
const FIXED_HEADER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dtype {
    F32,
    #[default]
    F64,
}

impl Dtype {
    fn code(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::F64 => 1,
        }
    }

    fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContainerObject {
    Cube(HyperCube),
    Aperture(CodedAperture),
    Measurement(Measurement),
    MeasurementStack(MeasurementSet),
}

impl From<HyperCube> for ContainerObject {
    fn from(v: HyperCube) -> Self {
        ContainerObject::Cube(v)
    }
}

impl From<CodedAperture> for ContainerObject {
    fn from(v: CodedAperture) -> Self {
        ContainerObject::Aperture(v)
    }
}

impl From<Measurement> for ContainerObject {
    fn from(v: Measurement) -> Self {
        ContainerObject::Measurement(v)
    }
}

impl From<MeasurementSet> for ContainerObject {
    fn from(v: MeasurementSet) -> Self {
        ContainerObject::MeasurementStack(v)
    }
}

impl ContainerObject {
    fn kind_code(&self) -> u8 {
        match self {
            ContainerObject::Cube(_) => 0,
            ContainerObject::Aperture(_) => 1,
            ContainerObject::Measurement(_) | ContainerObject::MeasurementStack(_) => 2,
        }
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            ContainerObject::Cube(c) => vec![c.bands(), c.height(), c.width()],
            ContainerObject::Aperture(a) => vec![a.height(), a.width()],
            ContainerObject::Measurement(m) => vec![m.height(), m.width()],
            ContainerObject::MeasurementStack(s) => {
                vec![s.len(), s.get(0).height(), s.get(0).width()]
            }
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            ContainerObject::Cube(c) => c.data().to_vec(),
            ContainerObject::Aperture(a) => a.data().to_vec(),
            ContainerObject::Measurement(m) => m.data().to_vec(),
            ContainerObject::MeasurementStack(s) => s.stacked(),
        }
    }

    pub fn into_cube(self) -> Option<HyperCube> {
        match self {
            ContainerObject::Cube(c) => Some(c),
            _ => None,
        }
    }

    pub fn into_aperture(self) -> Option<CodedAperture> {
        match self {
            ContainerObject::Aperture(a) => Some(a),
            _ => None,
        }
    }

    /// Single snapshots become one-element sets.
    pub fn into_measurements(self) -> Option<MeasurementSet> {
        match self {
            ContainerObject::Measurement(m) => Some(MeasurementSet::single(m)),
            ContainerObject::MeasurementStack(s) => Some(s),
            _ => None,
        }
    }
}

/// Serializes `object` to HSC1 bytes.
pub fn encode(object: &ContainerObject, dtype: Dtype) -> Result<Vec<u8>> {
    let dims = object.dims();
    let values = object.values();
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("container payload"));
    }
    let mut out = Vec::with_capacity(FIXED_HEADER + 4 * dims.len() + values.len() * dtype.size());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(object.kind_code());
    out.push(dtype.code());
    out.push(dims.len() as u8);
    out.push(0);
    for d in &dims {
        let d = u32::try_from(*d)
            .map_err(|_| Error::InvalidParameter(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    match dtype {
        Dtype::F64 => values
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        Dtype::F32 => {
            for v in &values {
                let narrow = *v as f32;
                if !narrow.is_finite() {
                    return Err(Error::NonFinite("container payload (f32 overflow)"));
                }
                out.extend_from_slice(&narrow.to_le_bytes());
            }
        }
    }
    Ok(out)
}

/// Parses HSC1 bytes; `path` is used only for error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<(ContainerObject, Dtype)> {
    let fail = |msg: String| Error::Format {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(fail("not an HSC1 file".into()));
    }
    if bytes.len() < FIXED_HEADER {
        return Err(fail("truncated header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(fail(format!("unsupported HSC1 version {version}")));
    }
    let (kind, dtype_code, rank, reserved) = (bytes[8], bytes[9], bytes[10] as usize, bytes[11]);
    let dtype = match dtype_code {
        0 => Dtype::F32,
        1 => Dtype::F64,
        other => return Err(fail(format!("unknown dtype code {other}"))),
    };
    if reserved != 0 {
        return Err(fail(format!("reserved byte is {reserved}, expected 0")));
    }
    let rank_ok = match kind {
        0 => rank == 3,
        1 => rank == 2,
        2 => rank == 2 || rank == 3,
        other => return Err(fail(format!("unknown object kind {other}"))),
    };
    if !rank_ok {
        return Err(fail(format!("rank {rank} invalid for object kind {kind}")));
    }
    let header_len = FIXED_HEADER + 4 * rank;
    if bytes.len() < header_len {
        return Err(fail("truncated header".into()));
    }
    let dims: Vec<usize> = (0..rank)
        .map(|i| {
            let at = FIXED_HEADER + 4 * i;
            u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize
        })
        .collect();
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| fail("dimension product overflows".into()))?;
    let payload = &bytes[header_len..];
    if Some(payload.len()) != count.checked_mul(dtype.size()) {
        return Err(fail(format!(
            "payload length mismatch: expected {} bytes, found {}",
            count.saturating_mul(dtype.size()),
            payload.len()
        )));
    }
    let values: Vec<f64> = match dtype {
        Dtype::F64 => payload
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect(),
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
            .collect(),
    };
    let wrap = |e: Error| fail(e.to_string());
    let object = match (kind, rank) {
        (0, _) => ContainerObject::Cube(
            HyperCube::from_vec(dims[0], dims[1], dims[2], values).map_err(wrap)?,
        ),
        (1, _) => ContainerObject::Aperture(
            CodedAperture::from_values(dims[0], dims[1], values).map_err(wrap)?,
        ),
        (_, 2) => ContainerObject::Measurement(
            Measurement::new(1, dims[0], dims[1], values).map_err(wrap)?,
        ),
        _ => {
            let plane = dims[1] * dims[2];
            let shots = (0..dims[0])
                .map(|i| {
                    Measurement::new(i + 1, dims[1], dims[2], values[i * plane..(i + 1) * plane].to_vec())
                })
                .collect::<Result<Vec<_>>>()
                .map_err(wrap)?;
            ContainerObject::MeasurementStack(MeasurementSet::new(shots).map_err(wrap)?)
        }
    };
    Ok((object, dtype))
}

pub fn write_container(
    object: &ContainerObject,
    path: impl AsRef<Path>,
    dtype: Dtype,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(object, dtype)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_container(path: impl AsRef<Path>) -> Result<ContainerObject> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path).map(|(object, _)| object)
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<HyperCube> {
    let path = path.as_ref();
    read_container(path)?.into_cube().ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        msg: "expected a cube".into(),
    })
}

pub fn read_aperture(path: impl AsRef<Path>) -> Result<CodedAperture> {
    let path = path.as_ref();
    read_container(path)?.into_aperture().ok_or_else(|| Error::Format {
        path: path.to_path_buf(),
        msg: "expected an aperture".into(),
    })
}

pub fn read_measurements(path: impl AsRef<Path>) -> Result<MeasurementSet> {
    let path = path.as_ref();
    read_container(path)?
        .into_measurements()
        .ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            msg: "expected a measurement".into(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn header_layout() {
        let cube = HyperCube::from_fn(3, 4, 4, |c, h, w| (c + h + w) as f64 / 16.0);
        let bytes = encode(&cube.into(), Dtype::F64).unwrap();
        assert_eq!(&bytes[..4], &[0x48, 0x53, 0x43, 0x31]);
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[0, 1, 3, 0]);
        assert_eq!(&bytes[12..24], &[3, 0, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0]);
        assert_eq!(bytes.len() - 24, 48 * 8);
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&CodedAperture::ones(2, 2).into(), Dtype::F64).unwrap();
        bytes[..4].copy_from_slice(b"XXXX");
        let err = decode(&bytes, p()).unwrap_err().to_string();
        assert!(err.contains("not an HSC1 file"), "{err}");
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode(&CodedAperture::ones(2, 2).into(), Dtype::F64).unwrap();
        let err = decode(&bytes[..bytes.len() - 1], p()).unwrap_err().to_string();
        assert!(err.contains("payload length mismatch"), "{err}");
    }

    #[test]
    fn unknown_version() {
        let mut bytes = encode(&CodedAperture::ones(2, 2).into(), Dtype::F64).unwrap();
        bytes[4] = 2;
        assert!(decode(&bytes, p()).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn rejects_wrong_rank_and_reserved() {
        let mut bytes = encode(&CodedAperture::ones(2, 2).into(), Dtype::F64).unwrap();
        bytes[11] = 7;
        assert!(decode(&bytes, p()).is_err());
        let mut bytes = encode(&CodedAperture::ones(2, 2).into(), Dtype::F64).unwrap();
        bytes[8] = 0; // claims cube, rank 2
        assert!(decode(&bytes, p()).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let m = Measurement::new(1, 1, 1, vec![1e300]).unwrap();
        assert!(encode(&m.into(), Dtype::F32).is_err());
    }

    #[test]
    fn measurement_width_from_header() {
        let m = Measurement::new(1, 2, 8, (0..16).map(f64::from).collect()).unwrap();
        let bytes = encode(&m.clone().into(), Dtype::F64).unwrap();
        let (obj, dtype) = decode(&bytes, p()).unwrap();
        assert_eq!(dtype, Dtype::F64);
        assert_eq!(obj, ContainerObject::Measurement(m));
    }
}
