mod common;

use cassi::optics::forward_shot;
use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::sampling::{
    acquire, complement_mask, content_response, default_filter_bank, inject_noise, predict_mask, random_mask,
    NoiseKind, NoiseModel, PredictorConfig, ShotMode, ShotPlan,
};
use cassi::{CodedAperture, Measurement, MeasurementSet, SensingConfig};
use common::*;

fn setup() -> (SensingConfig, cassi::HyperCube, Vec<CodedAperture>) {
    let cfg = SensingConfig::new(24, 24, 4, 1, 2).unwrap();
    let scene = make_phantom(&PhantomSpec::default_for(&cfg, 5), &cfg);
    let shared = vec![random_mask(&cfg, 0.5, 1).unwrap(), random_mask(&cfg, 0.5, 2).unwrap()];
    (cfg, scene, shared)
}

#[test]
fn zero_eta_returns_shared_mask() {
    let (cfg, scene, shared) = setup();
    let predictor = PredictorConfig::with_defaults(shared.clone(), 0.0).unwrap();
    let y1 = forward_shot(&scene, &shared[0], &cfg, 1).unwrap();
    assert_eq!(predict_mask(&y1, &predictor, 2, &cfg).unwrap().data(), shared[1].data());

    let plan = ShotPlan::new(ShotMode::ContentAware(predictor), 2, 0).unwrap();
    let fixed = ShotPlan::new(ShotMode::Fixed(shared.clone()), 2, 0).unwrap();
    let a = acquire(&scene, &plan, &cfg, &NoiseModel::none()).unwrap();
    let b = acquire(&scene, &fixed, &cfg, &NoiseModel::none()).unwrap();
    assert_eq!(a.measurements, b.measurements);
}

#[test]
fn constant_measurement_shifts_by_half_eta() {
    let (cfg, _, shared) = setup();
    let predictor = PredictorConfig::with_defaults(shared.clone(), 0.2).unwrap();
    let y = Measurement::new(1, cfg.height, cfg.measurement_width(), vec![0.7; cfg.measurement_len()]).unwrap();
    let m = predict_mask(&y, &predictor, 2, &cfg).unwrap();
    for (a, b) in m.data().iter().zip(shared[1].data()) {
        assert_eq!(*a, (b + 0.1f64).clamp(0.0, 1.0));
    }
}

#[test]
fn predicted_mask_depends_on_content() {
    let (cfg, scene, shared) = setup();
    let predictor = PredictorConfig::with_defaults(shared.clone(), 0.1).unwrap();
    let y1 = forward_shot(&scene, &shared[0], &cfg, 1).unwrap();
    let m = predict_mask(&y1, &predictor, 2, &cfg).unwrap();
    assert!(m.data().iter().all(|v| (0.0..=1.0).contains(v)));
    let changed = m.data().iter().zip(shared[1].data()).filter(|(a, b)| a != b).count();
    assert!(changed * 100 >= cfg.plane_len(), "only {changed} pixels changed");
}

#[test]
fn response_ignores_measurement_offset() {
    let (cfg, scene, shared) = setup();
    let y = forward_shot(&scene, &shared[0], &cfg, 1).unwrap();
    let lifted = y.map(|v| v + 0.25);
    let a = content_response(&y, &default_filter_bank(), &cfg).unwrap();
    let b = content_response(&lifted, &default_filter_bank(), &cfg).unwrap();
    assert!(max_dev(&a, &b) <= 1e-12);
}

#[test]
fn content_aware_plan_matches_manual_prediction() {
    let (cfg, scene, shared) = setup();
    let predictor = PredictorConfig::with_defaults(shared.clone(), 0.1).unwrap();
    let plan = ShotPlan::new(ShotMode::ContentAware(predictor.clone()), 2, 0).unwrap();
    let acq = acquire(&scene, &plan, &cfg, &NoiseModel::none()).unwrap();
    assert_eq!(acq.apertures[0], shared[0]);
    let y1 = forward_shot(&scene, &shared[0], &cfg, 1).unwrap();
    assert_eq!(acq.apertures[1], predict_mask(&y1, &predictor, 2, &cfg).unwrap());
}

#[test]
fn complement_properties() {
    let cfg = SensingConfig::new(5, 7, 1, 1, 1).unwrap();
    let m = random_mask(&cfg, 0.3, 9).unwrap();
    let c = complement_mask(&m);
    assert_eq!(complement_mask(&c), m);
    assert!(m.data().iter().zip(c.data()).all(|(a, b)| a * b == 0.0));
    assert_eq!(complement_mask(&CodedAperture::ones(5, 7)).data(), &[0.0; 35]);
    assert_eq!(random_mask(&cfg, 0.0, 1).unwrap().data(), &[0.0; 35]);
    assert_eq!(random_mask(&cfg, 1.0, 1).unwrap().data(), &[1.0; 35]);
    assert_eq!(random_mask(&cfg, 0.5, 4).unwrap(), random_mask(&cfg, 0.5, 4).unwrap());
}

#[test]
fn noise_models() {
    let cfg = SensingConfig::new(10, 10, 3, 1, 2).unwrap();
    let y = uniform_measurements(&cfg, 3);
    assert_eq!(inject_noise(&y, &NoiseModel::none()).unwrap(), y);
    let g0 = NoiseModel::new(NoiseKind::Gaussian { sigma: 0.0 }, 5).unwrap();
    assert_eq!(inject_noise(&y, &g0).unwrap(), y);
    let zeros = y.map(|_| 0.0);
    assert_eq!(inject_noise(&zeros, &NoiseModel::shot11(2)).unwrap(), zeros);
    let g = NoiseModel::new(NoiseKind::Gaussian { sigma: 0.1 }, 5).unwrap();
    assert_eq!(inject_noise(&y, &g).unwrap(), inject_noise(&y, &g).unwrap());
    assert_ne!(inject_noise(&y, &g).unwrap(), inject_noise(&y, &g.with_seed(6)).unwrap());
}

#[test]
fn shot11_moments() {
    let y = MeasurementSet::single(Measurement::new(1, 100, 100, vec![1.0; 10_000]).unwrap());
    let noisy = inject_noise(&y, &NoiseModel::shot11(17)).unwrap();
    let v = noisy.get(0).data();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    assert!((mean - 1.0).abs() <= 0.01, "mean {mean}");
    assert!((var * 2047.0 - 1.0).abs() <= 0.1, "variance {var}");
}
