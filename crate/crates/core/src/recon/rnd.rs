//! Range–null space decomposition iterations.
//!
//! Each phase keeps the measured range component and lets the proximal
//! step refine only what the measurements cannot see:
//!
//! ```text
//! v_i = y_i - H(x, F_i)
//! z_i = x + rho_k * H^+(v_i, E_i)
//! z   = sum_i w_i z_i
//! x   = prox(z, lambda)
//! ```

use std::time::Instant;

use super::common::{finish, Problem};
use super::config::{FusionMode, PinvMode, SolverConfig};
use super::report::ReconReport;
use crate::cube::{CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};
use crate::optics::{forward_shot, modulated_forward, pinv_appendix, EnhancedMask, PseudoInverse};

#[derive(Debug, Clone)]
enum ShotInverse {
    Exact(PseudoInverse),
    Appendix(EnhancedMask),
}

/// Operators an RND phase needs, built once per solve.
#[derive(Debug, Clone)]
pub struct RndOperators {
    config: SensingConfig,
    apertures: Vec<CodedAperture>,
    per_shot: Vec<ShotInverse>,
    joint: Option<PseudoInverse>,
}

impl RndOperators {
    pub fn new(apertures: &[CodedAperture], config: &SensingConfig, solver: &SolverConfig) -> Result<Self> {
        let config = config.with_shots(apertures.len())?;
        let single = config.with_shots(1)?;
        let (per_shot, joint) = match (solver.fusion, solver.pinv) {
            (FusionMode::Joint, PinvMode::Appendix) => {
                return Err(Error::InvalidParameter(
                    "joint fusion requires the exact pseudo-inverse".into(),
                ))
            }
            (FusionMode::Joint, PinvMode::Exact) => {
                (Vec::new(), Some(PseudoInverse::new(apertures, &config, solver.rcond)?))
            }
            (FusionMode::PerShot, PinvMode::Exact) => (
                apertures
                    .iter()
                    .map(|a| PseudoInverse::new(std::slice::from_ref(a), &single, solver.rcond).map(ShotInverse::Exact))
                    .collect::<Result<_>>()?,
                None,
            ),
            (FusionMode::PerShot, PinvMode::Appendix) => (
                apertures
                    .iter()
                    .map(|a| EnhancedMask::from_aperture(a, &single, solver.enhanced).map(ShotInverse::Appendix))
                    .collect::<Result<_>>()?,
                None,
            ),
        };
        Ok(Self {
            config,
            apertures: apertures.to_vec(),
            per_shot,
            joint,
        })
    }

    fn shot_update(&self, i: usize, x: &HyperCube, y: &Measurement) -> Result<HyperCube> {
        let single = self.config.with_shots(1)?;
        match &self.per_shot[i] {
            ShotInverse::Exact(pinv) => {
                let fx = forward_shot(x, &self.apertures[i], &single, 1)?;
                let v = residual(y, &fx)?;
                pinv.apply(&MeasurementSet::single(v))
            }
            ShotInverse::Appendix(enhanced) => {
                let fx = modulated_forward(x, enhanced, &single, 1)?;
                let v = residual(y, &fx)?;
                pinv_appendix(&v, enhanced, &single)
            }
        }
    }
}

fn residual(y: &Measurement, fx: &Measurement) -> Result<Measurement> {
    let data = y.data().iter().zip(fx.data()).map(|(a, b)| a - b).collect();
    Measurement::new(1, y.height(), y.width(), data)
}

/// One decomposition step from `x_prev`; returns the fused `z` of phase `phase`
/// (one-based).
pub fn rnd_step(
    x_prev: &HyperCube,
    measurements: &MeasurementSet,
    ops: &RndOperators,
    solver: &SolverConfig,
    phase: usize,
) -> Result<HyperCube> {
    measurements.check_config(&ops.config)?;
    let rho = solver.phase_step(phase);
    if let Some(joint) = &ops.joint {
        let fx = crate::optics::forward(x_prev, &ops.apertures, &ops.config)?;
        let v = MeasurementSet::new(
            measurements
                .iter()
                .zip(fx.iter())
                .map(|(y, f)| residual(y, f).and_then(|r| r.with_shot(y.shot())))
                .collect::<Result<_>>()?,
        )?;
        let update = joint.apply(&v)?;
        return x_prev.zip_with(&update, |a, u| a + rho * u);
    }
    let weights = solver.weights(phase, ops.apertures.len());
    let mut z = HyperCube::for_config(&ops.config);
    for (i, (y, w)) in measurements.iter().zip(&weights).enumerate() {
        let update = ops.shot_update(i, x_prev, y)?;
        let zi = x_prev.zip_with(&update, |a, u| a + rho * u)?;
        z = z.zip_with(&zi, |acc, v| acc + w * v)?;
    }
    Ok(z)
}

pub fn rnd_solve(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    solver: &SolverConfig,
    truth: Option<&HyperCube>,
) -> Result<ReconReport> {
    rnd_solve_observed(measurements, apertures, config, solver, truth, |_, _| {})
}

/// As [`rnd_solve`], calling `observer(k, z_k)` with every pre-prox iterate.
pub fn rnd_solve_observed(
    measurements: &MeasurementSet,
    apertures: &[CodedAperture],
    config: &SensingConfig,
    solver: &SolverConfig,
    truth: Option<&HyperCube>,
    mut observer: impl FnMut(usize, &HyperCube),
) -> Result<ReconReport> {
    let started = Instant::now();
    let problem = Problem::new(measurements, apertures, config, solver, truth)?;
    let ops = RndOperators::new(apertures, &problem.config, solver)?;
    let mut x = problem.initial(solver)?;
    let mut records = Vec::with_capacity(solver.phases);
    for k in 1..=solver.phases {
        let z = rnd_step(&x, measurements, &ops, solver, k)?;
        observer(k, &z);
        x = solver.prox.apply(&z, solver.lambda);
        records.push(problem.record(k, &x, solver.lambda)?);
    }
    Ok(finish("rnd", records, x, started))
}
