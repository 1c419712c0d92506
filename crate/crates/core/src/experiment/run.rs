//! Config-driven pipelines: acquisition, reconstruction, scoring, artifact
//! writing, the ablation pack and the dense-operator oracle.

use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, ModeName, SceneSource, SharedInit};
use super::io::{band_pgm, ensure_dir, metrics_csv, write_bytes, MetricsRow};
use crate::container::{read_aperture, read_cube, write_container, Dtype};
use crate::cube::{CodedAperture, HyperCube, MeasurementSet, SensingConfig};
use crate::error::{Error, Result};
use crate::metrics::{quality_report, QualityReport};
use crate::optics::{adjoint, build_dense_phi, forward, unstack, PseudoInverse, DEFAULT_ORACLE_CAP};
use crate::phantom::make_phantom;
use crate::recon::{solve, ReconReport};
use crate::rng::SplitMix64;
use crate::sampling::{
    acquire, complement_mask, default_filter_bank, random_mask, Acquisition, ConvLayer, Kernel, PredictorConfig,
    ShotMode, ShotPlan,
};

impl ExperimentConfig {
    /// Replaces every seed (phantom, shot plan, noise, solver) with `seed`.
    pub fn reseed(&mut self, seed: u64) {
        if let Some(SceneSource::Phantom(spec)) = &mut self.scene {
            *spec = spec.clone().with_seed(seed);
        }
        self.shots.seed = seed;
        self.noise = self.noise.with_seed(seed);
        self.solver.seed = seed;
    }
}

pub fn load_scene(config: &ExperimentConfig) -> Result<HyperCube> {
    match &config.scene {
        None => Err(Error::Config {
            line: 0,
            msg: "a [phantom] section or input.cube is required".into(),
        }),
        Some(SceneSource::Phantom(spec)) => Ok(make_phantom(spec, &config.sensing)),
        Some(SceneSource::Cube(path)) => {
            let cube = read_cube(path)?;
            cube.check_config(&config.sensing)?;
            Ok(cube)
        }
    }
}

/// Reads a kernel stack stored as an HSC1 cube: one square, odd-sided
/// kernel per band.
pub fn load_layer(path: &Path) -> Result<ConvLayer> {
    let stack = read_cube(path)?;
    if stack.height() != stack.width() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            msg: format!("kernels must be square, got {}x{}", stack.height(), stack.width()),
        });
    }
    let kernels = (0..stack.bands())
        .map(|c| Kernel::new(stack.height(), stack.band(c).to_vec()))
        .collect::<Result<Vec<_>>>()?;
    ConvLayer::new(kernels)
}

fn shared_masks(config: &ExperimentConfig) -> Result<Vec<CodedAperture>> {
    let (sensing, shots) = (&config.sensing, &config.shots);
    if !shots.masks.is_empty() {
        if shots.masks.len() != sensing.shots {
            return Err(Error::shape("shared mask files", sensing.shots, shots.masks.len()));
        }
        return shots.masks.iter().map(read_aperture).collect();
    }
    match shots.shared {
        SharedInit::Random => (0..sensing.shots)
            .map(|i| random_mask(sensing, shots.p, shots.seed.wrapping_add(i as u64)))
            .collect(),
        SharedInit::Complementary => {
            let base = random_mask(sensing, shots.p, shots.seed)?;
            let comp = complement_mask(&base);
            Ok((0..sensing.shots)
                .map(|i| if i % 2 == 0 { base.clone() } else { comp.clone() })
                .collect())
        }
    }
}

pub fn build_plan(config: &ExperimentConfig) -> Result<ShotPlan> {
    let shots = &config.shots;
    let mode = match shots.mode {
        ModeName::Fixed => ShotMode::Fixed(shots.masks.iter().map(read_aperture).collect::<Result<_>>()?),
        ModeName::Complementary => ShotMode::Complementary { p: shots.p },
        ModeName::Random => ShotMode::Random { p: shots.p },
        ModeName::ContentAware => {
            let mut layers = default_filter_bank();
            for (slot, path) in layers.iter_mut().zip(&shots.layers) {
                if let Some(path) = path {
                    *slot = load_layer(path)?;
                }
            }
            ShotMode::ContentAware(PredictorConfig::new(shared_masks(config)?, shots.eta.clone(), layers)?)
        }
    };
    ShotPlan::new(mode, config.sensing.shots, shots.seed)
}

/// Scene plus the captured shots, without reconstruction.
pub fn simulate(config: &ExperimentConfig) -> Result<(HyperCube, Acquisition)> {
    let truth = load_scene(config)?;
    let plan = build_plan(config)?;
    let acquisition = acquire(&truth, &plan, &config.sensing, &config.noise)?;
    Ok((truth, acquisition))
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub truth: HyperCube,
    pub acquisition: Acquisition,
    pub report: ReconReport,
    pub quality: QualityReport,
    pub row: MetricsRow,
    /// Artifacts written, in write order.
    pub files: Vec<PathBuf>,
}

/// Simulates, reconstructs and scores without touching the filesystem.
pub fn evaluate(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let (truth, acquisition) = simulate(config)?;
    let report = solve(
        &acquisition.measurements,
        &acquisition.apertures,
        &config.sensing,
        &config.solver,
        Some(&truth),
    )?;
    let quality = quality_report(&truth, &report.cube)?;
    let row = MetricsRow {
        scene: config.output.scene.clone(),
        algorithm: config.solver.algorithm.name().to_string(),
        shots: config.sensing.shots,
        phases: config.solver.phases,
        quality: quality.clone(),
    };
    Ok(ExperimentOutcome {
        truth,
        acquisition,
        report,
        quality,
        row,
        files: Vec::new(),
    })
}

/// Writes masks, truth/measurement/recovered cubes, per-iteration and
/// metrics CSV and band images into the output directory, as enabled.
pub fn write_outcome(config: &ExperimentConfig, outcome: &mut ExperimentOutcome) -> Result<()> {
    let out = &config.output;
    ensure_dir(&out.dir)?;
    let mut files = Vec::new();
    if out.masks {
        for (i, mask) in outcome.acquisition.apertures.iter().enumerate() {
            let path = out.dir.join(format!("mask_{}.hsc", i + 1));
            write_container(&mask.clone().into(), &path, Dtype::F64)?;
            files.push(path);
        }
    }
    if out.cubes {
        for (name, object) in [
            ("truth.hsc", outcome.truth.clone().into()),
            ("measurements.hsc", outcome.acquisition.measurements.clone().into()),
            ("recovered.hsc", outcome.report.cube.clone().into()),
        ] {
            let path = out.dir.join(name);
            write_container(&object, &path, Dtype::F64)?;
            files.push(path);
        }
    }
    if out.csv {
        let path = out.dir.join("iterations.csv");
        write_bytes(&path, outcome.report.to_csv().as_bytes())?;
        files.push(path);
        let path = out.dir.join("metrics.csv");
        write_bytes(&path, metrics_csv(std::slice::from_ref(&outcome.row)).as_bytes())?;
        files.push(path);
    }
    if out.band_images {
        for c in 0..outcome.report.cube.bands() {
            let path = out.dir.join(format!("recovered_band_{:02}.pgm", c + 1));
            write_bytes(&path, &band_pgm(&outcome.report.cube, c))?;
            files.push(path);
        }
    }
    outcome.files = files;
    Ok(())
}

/// Full pipeline: the progressive acquisition loop, reconstruction,
/// scoring and artifact output.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut outcome = evaluate(config)?;
    write_outcome(config, &mut outcome)?;
    Ok(outcome)
}

/// Cases of the ablation pack, in order.
pub const ABLATION_CASES: [&str; 3] = ["fixed-1", "fixed-2", "content-aware-2"];

/// Runs one fixed shot, two fixed shots and two content-aware shots on the
/// same scene with the same solver budget. The fixed cases use exactly the
/// shared masks the content-aware case starts from. Writes `ablation.csv`
/// when CSV output is enabled.
pub fn run_ablation(base: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    let mut two = base.clone();
    two.sensing = base.sensing.with_shots(2)?;
    two.shots.eta = if base.shots.eta.len() == 2 {
        base.shots.eta.clone()
    } else {
        vec![base.shots.eta[0]; 2]
    };
    let shared = shared_masks(&two)?;

    let mut rows = Vec::with_capacity(3);
    for (case, name) in ABLATION_CASES.iter().enumerate() {
        let mut cfg = two.clone();
        match case {
            0 => {
                cfg.sensing = base.sensing.with_shots(1)?;
                cfg.solver.fusion_weights = Default::default();
                let plan = ShotPlan::new(ShotMode::Fixed(shared[..1].to_vec()), 1, cfg.shots.seed)?;
                rows.push(evaluate_with_plan(&cfg, &plan, name)?);
            }
            1 => {
                let plan = ShotPlan::new(ShotMode::Fixed(shared.clone()), 2, cfg.shots.seed)?;
                rows.push(evaluate_with_plan(&cfg, &plan, name)?);
            }
            _ => {
                let predictor = PredictorConfig::new(shared.clone(), cfg.shots.eta.clone(), default_filter_bank())?;
                let plan = ShotPlan::new(ShotMode::ContentAware(predictor), 2, cfg.shots.seed)?;
                rows.push(evaluate_with_plan(&cfg, &plan, name)?);
            }
        }
    }
    if base.output.csv {
        ensure_dir(&base.output.dir)?;
        write_bytes(&base.output.dir.join("ablation.csv"), metrics_csv(&rows).as_bytes())?;
    }
    Ok(rows)
}

fn evaluate_with_plan(config: &ExperimentConfig, plan: &ShotPlan, case: &str) -> Result<MetricsRow> {
    let truth = load_scene(config)?;
    let acq = acquire(&truth, plan, &config.sensing, &config.noise)?;
    let report = solve(&acq.measurements, &acq.apertures, &config.sensing, &config.solver, Some(&truth))?;
    Ok(MetricsRow {
        scene: format!("{}:{case}", config.output.scene),
        algorithm: config.solver.algorithm.name().to_string(),
        shots: config.sensing.shots,
        phases: config.solver.phases,
        quality: quality_report(&truth, &report.cube)?,
    })
}

pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub cap: usize,
    /// Test hook: perturbs the adjoint so the check must fail.
    pub corrupt_adjoint: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ORACLE_CAP,
            corrupt_adjoint: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// `(check, max absolute deviation)`.
    pub deviations: Vec<(&'static str, f64)>,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.deviations.iter().all(|(_, d)| *d <= self.tolerance)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, d) in &self.deviations {
            let verdict = if *d <= self.tolerance { "ok" } else { "FAIL" };
            out.push_str(&format!("{name:<14} max|dev| = {d:.3e}  {verdict}\n"));
        }
        out
    }
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Compares the matrix-free operators with dense `Phi` algebra on the
/// configured instance. The apertures come from the configured shot plan.
pub fn run_oracle(config: &ExperimentConfig, options: OracleOptions) -> Result<OracleReport> {
    let sensing: SensingConfig = config.sensing;
    let (truth, acquisition) = simulate(config)?;
    let apertures = &acquisition.apertures;
    let phi = build_dense_phi(apertures, &sensing, options.cap)?;
    let phi_pinv = phi.pseudo_inverse(1e-10);
    let x = truth.data();

    let mut rng = SplitMix64::new(config.shots.seed ^ 0x6f72_6163_6c65);
    let y_vec: Vec<f64> = (0..phi.rows()).map(|_| rng.next_f64()).collect();
    let y: MeasurementSet = unstack(&y_vec, &sensing)?;

    let fwd = forward(&truth, apertures, &sensing)?.stacked();
    let mut adj = adjoint(&y, apertures, &sensing)?;
    if options.corrupt_adjoint {
        adj = adj.map(|v| v * 1.001 + 1e-3);
    }
    let pinv = PseudoInverse::new(apertures, &sensing, config.solver.rcond)?;
    let rec = pinv.apply(&y)?;
    let pr = pinv.project_range(&truth)?;
    let pn = pinv.project_null(&truth)?;

    let dense_pinv_y = phi_pinv.matvec(&y_vec);
    let dense_pr = phi_pinv.matvec(&phi.matvec(x));
    let dense_pn: Vec<f64> = x.iter().zip(&dense_pr).map(|(a, b)| a - b).collect();

    Ok(OracleReport {
        deviations: vec![
            ("forward", max_dev(&fwd, &phi.matvec(x))),
            ("adjoint", max_dev(adj.data(), &phi.transpose_matvec(&y_vec))),
            ("pinv_exact", max_dev(rec.data(), &dense_pinv_y)),
            ("project_range", max_dev(pr.data(), &dense_pr)),
            ("project_null", max_dev(pn.data(), &dense_pn)),
        ],
        tolerance: ORACLE_TOLERANCE,
    })
}

/// Process exit status for a failed command.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Config { .. } => 2,
        Error::Numeric(_) | Error::NonFinite(_) => 3,
        Error::OracleCap { .. } => 4,
        _ => 1,
    }
}
