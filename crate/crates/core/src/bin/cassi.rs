//! Command-line front end for the CASSI toolkit.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cassi::container::{read_aperture, read_cube, read_measurements, write_container, Dtype};
use cassi::experiment::{
    band_pgm, exit_code, load_scene, metrics_csv, run_ablation, run_experiment, run_oracle, simulate,
    ExperimentConfig, MetricsRow, OracleOptions,
};
use cassi::metrics::quality_report;
use cassi::optics::DEFAULT_ORACLE_CAP;
use cassi::recon::solve;
use cassi::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cassi", version, about = "Coded aperture snapshot spectral imaging: simulation and reconstruction")]
struct Cli {
    /// Worker threads for parallel kernels (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, `section.key=value` (repeatable).
    #[arg(long = "set", value_name = "K=V")]
    set: Vec<String>,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config, &self.set)?;
        if let Some(seed) = self.seed {
            cfg.reseed(seed);
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured scene and write it as `phantom.hsc`.
    Phantom(Common),
    /// Run the shot plan against the scene and write the apertures.
    Mask(Common),
    /// Acquire measurements; writes masks, truth and measurement stack.
    Sample(Common),
    /// Reconstruct from stored measurements and apertures.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Measurement file (single shot or stack).
        #[arg(long)]
        measurements: PathBuf,
        /// Aperture file per shot, in shot order (repeatable).
        #[arg(long = "mask", required = true)]
        masks: Vec<PathBuf>,
        /// Reference cube; enables per-iteration PSNR and metrics.csv.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Score an estimate against a reference cube.
    Metrics {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        estimate: PathBuf,
        /// Directory for metrics.csv; prints to stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "scene")]
        scene: String,
        #[arg(long, default_value = "external")]
        algorithm: String,
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long = "phases", default_value_t = 0)]
        phases: usize,
    },
    /// Check matrix-free operators against dense linear algebra.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Maximum number of dense matrix entries.
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
        /// Test hook: perturb the adjoint so the check fails.
        #[arg(long, hide = true)]
        corrupt_adjoint: bool,
    },
    /// Full experiment: acquire, reconstruct, score and write artifacts.
    Pipeline {
        #[command(flatten)]
        common: Common,
        /// Run the 1-fixed / 2-fixed / 2-content-aware ablation pack instead.
        #[arg(long)]
        ablation: bool,
    },
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn mkdir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn run(cli: Cli) -> Result<i32> {
    let quiet = cli.quiet;
    let say = |msg: String| {
        if !quiet {
            println!("{msg}");
        }
    };
    match cli.command {
        Command::Phantom(common) => {
            let cfg = common.load()?;
            let cube = load_scene(&cfg)?;
            mkdir(&cfg.output.dir)?;
            let path = cfg.output.dir.join("phantom.hsc");
            write_container(&cube.clone().into(), &path, Dtype::F64)?;
            if cfg.output.band_images {
                for c in 0..cube.bands() {
                    write(&cfg.output.dir.join(format!("phantom_band_{:02}.pgm", c + 1)), &band_pgm(&cube, c))?;
                }
            }
            say(format!("wrote {}", path.display()));
        }
        Command::Mask(common) => {
            let cfg = common.load()?;
            let (_, acq) = simulate(&cfg)?;
            mkdir(&cfg.output.dir)?;
            for (i, mask) in acq.apertures.iter().enumerate() {
                let path = cfg.output.dir.join(format!("mask_{}.hsc", i + 1));
                write_container(&mask.clone().into(), &path, Dtype::F64)?;
                say(format!("wrote {}", path.display()));
            }
        }
        Command::Sample(common) => {
            let cfg = common.load()?;
            let (truth, acq) = simulate(&cfg)?;
            mkdir(&cfg.output.dir)?;
            for (i, mask) in acq.apertures.iter().enumerate() {
                write_container(&mask.clone().into(), cfg.output.dir.join(format!("mask_{}.hsc", i + 1)), Dtype::F64)?;
            }
            write_container(&truth.into(), cfg.output.dir.join("truth.hsc"), Dtype::F64)?;
            write_container(&acq.measurements.into(), cfg.output.dir.join("measurements.hsc"), Dtype::F64)?;
            say(format!("wrote {} shot(s) to {}", acq.apertures.len(), cfg.output.dir.display()));
        }
        Command::Reconstruct {
            common,
            measurements,
            masks,
            truth,
        } => {
            let cfg = common.load()?;
            let ms = read_measurements(&measurements)?;
            let apertures = masks.iter().map(read_aperture).collect::<Result<Vec<_>>>()?;
            let sensing = cfg.sensing.with_shots(apertures.len())?;
            let truth = truth.map(read_cube).transpose()?;
            let report = solve(&ms, &apertures, &sensing, &cfg.solver, truth.as_ref())?;
            mkdir(&cfg.output.dir)?;
            write_container(&report.cube.clone().into(), cfg.output.dir.join("recovered.hsc"), Dtype::F64)?;
            write(&cfg.output.dir.join("iterations.csv"), report.to_csv().as_bytes())?;
            if let Some(truth) = &truth {
                let row = MetricsRow {
                    scene: cfg.output.scene.clone(),
                    algorithm: report.algorithm.to_string(),
                    shots: apertures.len(),
                    phases: cfg.solver.phases,
                    quality: quality_report(truth, &report.cube)?,
                };
                write(&cfg.output.dir.join("metrics.csv"), metrics_csv(std::slice::from_ref(&row)).as_bytes())?;
                say(format!("psnr {:.3} dB", row.quality.psnr_cube));
            }
            say(format!("{} phases in {:.2?}", report.records.len(), report.wall_time));
        }
        Command::Metrics {
            reference,
            estimate,
            out,
            scene,
            algorithm,
            shots,
            phases,
        } => {
            let quality = quality_report(&read_cube(&reference)?, &read_cube(&estimate)?)?;
            let csv = metrics_csv(&[MetricsRow {
                scene,
                algorithm,
                shots,
                phases,
                quality,
            }]);
            match out {
                Some(dir) => {
                    mkdir(&dir)?;
                    write(&dir.join("metrics.csv"), csv.as_bytes())?;
                }
                None => print!("{csv}"),
            }
        }
        Command::Oracle {
            common,
            cap,
            corrupt_adjoint,
        } => {
            let cfg = common.load()?;
            let report = run_oracle(&cfg, OracleOptions { cap, corrupt_adjoint })?;
            if !quiet {
                print!("{}", report.to_text());
            }
            return Ok(if report.passed() { 0 } else { 1 });
        }
        Command::Pipeline { common, ablation } => {
            let cfg = common.load()?;
            if ablation {
                for row in run_ablation(&cfg)? {
                    say(row.to_csv_line());
                }
            } else {
                let outcome = run_experiment(&cfg)?;
                say(outcome.row.to_csv_line());
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
