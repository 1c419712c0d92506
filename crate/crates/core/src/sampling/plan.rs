//! Shot scheduling and the progressive acquisition loop.

use super::masks::{complement_mask, random_mask};
use super::noise::{inject_noise, NoiseModel};
use super::predictor::{predict_mask, PredictorConfig};
use crate::cube::{CodedAperture, HyperCube, Measurement, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};
use crate::optics::forward_shot;

#[derive(Debug, Clone, PartialEq)]
pub enum ShotMode {
    /// Explicit apertures, one per shot.
    Fixed(Vec<CodedAperture>),
    /// A seeded random binary mask `M` alternating with `1 - M`.
    Complementary { p: f64 },
    /// Independent random binary masks seeded `seed, seed + 1, ...`.
    Random { p: f64 },
    /// Shot 1 uses the first shared mask; later shots are predicted from
    /// the previous snapshot.
    ContentAware(PredictorConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotPlan {
    mode: ShotMode,
    shots: usize,
    seed: u64,
}

impl ShotPlan {
    pub fn new(mode: ShotMode, shots: usize, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidParameter("a shot plan needs at least one shot".into()));
        }
        match &mode {
            ShotMode::Fixed(masks) if masks.len() != shots => {
                return Err(Error::shape("fixed apertures", shots, masks.len()))
            }
            ShotMode::ContentAware(p) if p.shots() != shots => {
                return Err(Error::shape("predictor shots", shots, p.shots()))
            }
            ShotMode::Complementary { p } | ShotMode::Random { p } if !(0.0..=1.0).contains(p) => {
                return Err(Error::InvalidParameter(format!("open probability {p} outside [0, 1]")))
            }
            _ => {}
        }
        Ok(Self { mode, shots, seed })
    }

    pub fn mode(&self) -> &ShotMode {
        &self.mode
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Apertures known up front, or a sampler that needs each snapshot before
/// it can produce the next aperture.
#[derive(Debug, Clone)]
pub enum Schedule {
    Upfront(Vec<CodedAperture>),
    Progressive(ProgressiveSampler),
}

#[derive(Debug, Clone)]
pub struct ProgressiveSampler {
    predictor: PredictorConfig,
    config: SensingConfig,
    next_shot: usize,
}

impl ProgressiveSampler {
    pub fn first_mask(&self) -> &CodedAperture {
        &self.predictor.shared()[0]
    }

    /// One-based index of the shot whose aperture `next_mask` will return.
    pub fn next_shot(&self) -> usize {
        self.next_shot
    }

    /// Consumes the snapshot of shot `next_shot - 1` and yields the aperture
    /// for `next_shot`, or `None` once every shot has been planned.
    pub fn next_mask(&mut self, prev: &Measurement) -> Result<Option<CodedAperture>> {
        if self.next_shot > self.predictor.shots() {
            return Ok(None);
        }
        if prev.shot() + 1 != self.next_shot {
            return Err(Error::InvalidParameter(format!(
                "expected the snapshot of shot {}, got shot {}",
                self.next_shot - 1,
                prev.shot()
            )));
        }
        let mask = predict_mask(prev, &self.predictor, self.next_shot, &self.config)?;
        self.next_shot += 1;
        Ok(Some(mask))
    }
}

pub fn plan_shots(plan: &ShotPlan, config: &SensingConfig) -> Result<Schedule> {
    let n = plan.shots;
    let masks = match &plan.mode {
        ShotMode::Fixed(masks) => {
            masks.iter().try_for_each(|m| m.check_config(config))?;
            masks.clone()
        }
        ShotMode::Complementary { p } => {
            let base = random_mask(config, *p, plan.seed)?;
            let comp = complement_mask(&base);
            (0..n).map(|i| if i % 2 == 0 { base.clone() } else { comp.clone() }).collect()
        }
        ShotMode::Random { p } => (0..n)
            .map(|i| random_mask(config, *p, plan.seed.wrapping_add(i as u64)))
            .collect::<Result<_>>()?,
        ShotMode::ContentAware(predictor) => {
            predictor.shared().iter().try_for_each(|m| m.check_config(config))?;
            return Ok(Schedule::Progressive(ProgressiveSampler {
                predictor: predictor.clone(),
                config: *config,
                next_shot: 2,
            }));
        }
    };
    Ok(Schedule::Upfront(masks))
}

/// Result of running a shot plan against a scene.
#[derive(Debug, Clone)]
pub struct Acquisition {
    pub apertures: Vec<CodedAperture>,
    pub measurements: MeasurementSet,
}

/// Captures `cube` shot by shot. Each snapshot is noised on its own (noise
/// seed `seed + shot - 1`) before the next aperture is chosen, so the
/// predictor only sees what a sensor would record.
pub fn acquire(
    cube: &HyperCube,
    plan: &ShotPlan,
    config: &SensingConfig,
    noise: &NoiseModel,
) -> Result<Acquisition> {
    let config = config.with_shots(plan.shots)?;
    let mut schedule = plan_shots(plan, &config)?;
    let mut apertures = Vec::with_capacity(plan.shots);
    let mut shots: Vec<Measurement> = Vec::with_capacity(plan.shots);
    for i in 1..=plan.shots {
        let mask = match &mut schedule {
            Schedule::Upfront(masks) => masks[i - 1].clone(),
            Schedule::Progressive(sampler) => match shots.last() {
                None => sampler.first_mask().clone(),
                Some(prev) => sampler
                    .next_mask(prev)?
                    .expect("sampler covers every planned shot"),
            },
        };
        let clean = forward_shot(cube, &mask, &config, i)?;
        let model = noise.with_seed(noise.seed().wrapping_add(i as u64 - 1));
        let noisy = inject_noise(&MeasurementSet::single(clean), &model)?;
        shots.push(noisy.into_vec().pop().expect("one shot"));
        apertures.push(mask);
    }
    Ok(Acquisition {
        apertures,
        measurements: MeasurementSet::new(shots)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SensingConfig {
        SensingConfig::new(6, 6, 3, 1, 3).unwrap()
    }

    #[test]
    fn complementary_pair() {
        let plan = ShotPlan::new(ShotMode::Complementary { p: 0.5 }, 2, 4).unwrap();
        let Schedule::Upfront(m) = plan_shots(&plan, &cfg()).unwrap() else {
            panic!("expected upfront masks")
        };
        assert_eq!(m[1], complement_mask(&m[0]));
    }

    #[test]
    fn random_uses_consecutive_seeds() {
        let plan = ShotPlan::new(ShotMode::Random { p: 0.5 }, 3, 10).unwrap();
        let Schedule::Upfront(m) = plan_shots(&plan, &cfg()).unwrap() else {
            panic!("expected upfront masks")
        };
        for (i, mask) in m.iter().enumerate() {
            assert_eq!(mask, &random_mask(&cfg(), 0.5, 10 + i as u64).unwrap());
        }
    }

    #[test]
    fn plan_validation() {
        assert!(ShotPlan::new(ShotMode::Random { p: 0.5 }, 0, 1).is_err());
        assert!(ShotPlan::new(ShotMode::Fixed(vec![CodedAperture::ones(6, 6)]), 2, 1).is_err());
        assert!(ShotPlan::new(ShotMode::Random { p: 2.0 }, 1, 1).is_err());
    }

    #[test]
    fn single_shot_content_aware_degenerates() {
        let predictor = PredictorConfig::with_defaults(vec![CodedAperture::ones(6, 6)], 0.1).unwrap();
        let plan = ShotPlan::new(ShotMode::ContentAware(predictor), 1, 0).unwrap();
        let Schedule::Progressive(mut s) = plan_shots(&plan, &cfg()).unwrap() else {
            panic!("expected progressive")
        };
        let y = Measurement::zeros(1, &cfg());
        assert_eq!(s.next_mask(&y).unwrap(), None);
    }
}
