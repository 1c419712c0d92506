//! Reconstruction solvers behind a pluggable proximal operator: ISTA,
//! GAP-TV and range–null space decomposition (RND).

mod common;
mod config;
mod gap;
mod ista;
mod prox;
mod report;
mod rnd;

pub use config::{Algorithm, FusionMode, FusionWeights, Initialization, PinvMode, SolverConfig, StepSize};
pub use gap::gap_tv_solve;
pub use ista::{ista_solve, ista_step, AUTO_STEP_MARGIN};
pub use prox::{
    tv_band, tv_denoise, tv_norm, tv_prox_objective, IdentityProx, ProxOperator, TvProx, DEFAULT_TV_ITERATIONS,
};
pub use report::{IterationRecord, ReconReport};
pub use rnd::{rnd_solve, rnd_solve_observed, rnd_step, RndOperators};

use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::Result;

/// Dispatches on `solver.algorithm`.
pub fn solve(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    solver: &SolverConfig,
    truth: Option<&HyperCube>,
) -> Result<ReconReport> {
    match solver.algorithm {
        Algorithm::Ista => ista_solve(measurements, apertures, config, solver, truth),
        Algorithm::GapTv => gap_tv_solve(measurements, apertures, config, solver, truth),
        Algorithm::Rnd => rnd_solve(measurements, apertures, config, solver, truth),
    }
}
