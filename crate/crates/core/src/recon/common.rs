use std::time::Instant;

use super::config::{Initialization, PinvMode, SolverConfig};
use super::prox::tv_norm;
use super::report::{IterationRecord, ReconReport};
use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};
use crate::metrics::{psnr, DEFAULT_PEAK};
use crate::optics::{adjoint, forward, pinv_appendix, EnhancedMask, PseudoInverse};

/// Validated inputs shared by all solvers.
pub(crate) struct Problem<'a> {
    pub measurements: &'a MeasurementSet,
    pub apertures: &'a [CodedAperture],
    pub config: SensingConfig,
    pub truth: Option<&'a HyperCube>,
}

impl<'a> Problem<'a> {
    pub fn new(
        measurements: &'a MeasurementSet,
        apertures: &'a [CodedAperture],
        config: &SensingConfig,
        solver: &SolverConfig,
        truth: Option<&'a HyperCube>,
    ) -> Result<Self> {
        let config = config.with_shots(apertures.len())?;
        measurements.check_config(&config)?;
        apertures.iter().try_for_each(|a| a.check_config(&config))?;
        if let Some(t) = truth {
            t.check_config(&config)?;
        }
        solver.validate(apertures.len())?;
        Ok(Self {
            measurements,
            apertures,
            config,
            truth,
        })
    }

    pub fn residual(&self, x: &HyperCube) -> Result<MeasurementSet> {
        let fx = forward(x, self.apertures, &self.config)?;
        let shots = self
            .measurements
            .iter()
            .zip(fx.iter())
            .map(|(y, f)| {
                let data = y.data().iter().zip(f.data()).map(|(a, b)| a - b).collect();
                crate::cube::Measurement::new(y.shot(), y.height(), y.width(), data)
            })
            .collect::<Result<Vec<_>>>()?;
        MeasurementSet::new(shots)
    }

    pub fn record(&self, iteration: usize, x: &HyperCube, lambda: f64) -> Result<IterationRecord> {
        if !x.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite iterate at iteration {iteration}; the step size is probably too large"
            )));
        }
        let r = self.residual(x)?;
        let sq: f64 = r.iter().flat_map(|s| s.data()).map(|v| v * v).sum();
        let objective = 0.5 * sq + lambda * tv_norm(x);
        let psnr = match self.truth {
            Some(t) => Some(psnr(t, x, DEFAULT_PEAK)?),
            None => None,
        };
        Ok(IterationRecord {
            iteration,
            objective,
            data_fidelity: sq.sqrt(),
            psnr,
        })
    }

    pub fn initial(&self, solver: &SolverConfig) -> Result<HyperCube> {
        match &solver.init {
            Initialization::Zero => Ok(HyperCube::for_config(&self.config)),
            Initialization::Adjoint => adjoint(self.measurements, self.apertures, &self.config),
            Initialization::Given(x) => {
                x.check_config(&self.config)?;
                Ok(x.clone())
            }
            Initialization::Pinv => {
                let first = self.measurements.get(0);
                let single = self.config.with_shots(1)?;
                match solver.pinv {
                    PinvMode::Exact => PseudoInverse::new(&self.apertures[..1], &single, solver.rcond)?
                        .apply(&MeasurementSet::single(first.clone().with_shot(1)?)),
                    PinvMode::Appendix => {
                        let e = EnhancedMask::from_aperture(&self.apertures[0], &single, solver.enhanced)?;
                        pinv_appendix(first, &e, &single)
                    }
                }
            }
        }
    }
}

pub(crate) fn finish(
    algorithm: &'static str,
    records: Vec<IterationRecord>,
    cube: HyperCube,
    started: Instant,
) -> ReconReport {
    ReconReport {
        algorithm,
        records,
        cube,
        wall_time: started.elapsed(),
    }
}
