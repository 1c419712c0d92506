use std::time::Instant;

use super::common::{finish, Problem};
use super::config::{SolverConfig, StepSize};
use super::report::ReconReport;
use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::Result;
use crate::optics::{adjoint, operator_norm};

/// Safety factor in the automatic step `0.95 / ||Phi||^2`.
pub const AUTO_STEP_MARGIN: f64 = 0.95;

/// Resolves the ISTA step for a given operator.
pub fn ista_step(apertures: &[CodedAperture], config: &SensingConfig, solver: &SolverConfig) -> Result<f64> {
    match solver.step {
        StepSize::Fixed(r) => Ok(r),
        StepSize::Auto => {
            let config = config.with_shots(apertures.len())?;
            let norm = operator_norm(apertures, &config, solver.power_iterations, solver.seed)?;
            Ok(AUTO_STEP_MARGIN / (norm * norm))
        }
    }
}

/// Proximal gradient: `r = x - rho Phi^T (Phi x - y)`, `x = prox(r, rho lambda)`.
pub fn ista_solve(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    solver: &SolverConfig,
    truth: Option<&HyperCube>,
) -> Result<ReconReport> {
    let started = Instant::now();
    let problem = Problem::new(measurements, apertures, config, solver, truth)?;
    let rho = ista_step(apertures, &problem.config, solver)?;
    let mut x = problem.initial(solver)?;
    let mut records = Vec::with_capacity(solver.phases);
    for k in 1..=solver.phases {
        let residual = problem.residual(&x)?;
        let grad = adjoint(&residual, apertures, &problem.config)?;
        // residual is y - Phi x, so the descent step adds rho * Phi^T residual
        let r = x.zip_with(&grad, |a, g| a + rho * g)?;
        x = solver.prox.apply(&r, rho * solver.lambda);
        records.push(problem.record(k, &x, solver.lambda)?);
    }
    Ok(finish("ista", records, x, started))
}
