use std::time::Instant;

use super::common::{finish, Problem};
use super::config::SolverConfig;
use super::report::ReconReport;
use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::Result;
use crate::optics::PseudoInverse;

/// Generalized alternating projection with a denoising step:
/// `x = v + Phi^+ (y - Phi v)`, `v = prox(x, lambda)`. The recorded iterate
/// and the returned cube are the projected `x`, which satisfies `Phi x = y`
/// on every covered measurement pixel.
pub fn gap_tv_solve(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    solver: &SolverConfig,
    truth: Option<&HyperCube>,
) -> Result<ReconReport> {
    let started = Instant::now();
    let problem = Problem::new(measurements, apertures, config, solver, truth)?;
    let pinv = PseudoInverse::new(apertures, &problem.config, solver.rcond)?;
    let mut v = problem.initial(solver)?;
    let mut x = v.clone();
    let mut records = Vec::with_capacity(solver.phases);
    for k in 1..=solver.phases {
        let correction = pinv.apply(&problem.residual(&v)?)?;
        x = v.add(&correction)?;
        records.push(problem.record(k, &x, solver.lambda)?);
        v = solver.prox.apply(&x, solver.lambda);
    }
    Ok(finish("gap_tv", records, x, started))
}
