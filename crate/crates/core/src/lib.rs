pub mod container;
pub mod cube;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod optics;
pub mod phantom;
pub mod recon;
pub mod rng;
pub mod sampling;

pub use cube::{ApertureKind, CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};
pub use error::{Error, Result};
