//! Coded aperture strategies, content-aware prediction, shot scheduling and
//! measurement noise.

mod masks;
mod noise;
mod plan;
mod predictor;

pub use masks::{complement_mask, random_mask};
pub use noise::{inject_noise, NoiseKind, NoiseModel, DEFAULT_FULL_SCALE};
pub use plan::{acquire, plan_shots, Acquisition, ProgressiveSampler, Schedule, ShotMode, ShotPlan};
pub use predictor::{
    content_response, default_filter_bank, predict_mask, realign, ConvLayer, Kernel, PredictorConfig,
    DEFAULT_ETA,
};
