//! Reconstruct the same two-shot measurement with ISTA, GAP-TV and RND.
//!
//! cargo run --release --example reconstruct_compare

use cassi::metrics::quality_report;
use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::recon::{solve, Algorithm, SolverConfig};
use cassi::sampling::{acquire, NoiseModel, ShotMode, ShotPlan};
use cassi::SensingConfig;

fn main() -> cassi::Result<()> {
    let cfg = SensingConfig::new(48, 48, 8, 1, 2)?;
    let truth = make_phantom(&PhantomSpec::default_for(&cfg, 2), &cfg);
    let plan = ShotPlan::new(ShotMode::Complementary { p: 0.5 }, 2, 17)?;
    let acq = acquire(&truth, &plan, &cfg, &NoiseModel::none())?;

    println!("{:<8} {:>8} {:>8} {:>10}", "solver", "psnr", "ssim", "time");
    for algorithm in [Algorithm::Ista, Algorithm::GapTv, Algorithm::Rnd] {
        let solver = SolverConfig::new(algorithm, 60).with_lambda(0.02);
        let report = solve(&acq.measurements, &acq.apertures, &cfg, &solver, Some(&truth))?;
        let q = quality_report(&truth, &report.cube)?;
        println!(
            "{:<8} {:>8.2} {:>8.4} {:>10.2?}",
            algorithm.name(),
            q.psnr_cube,
            q.ssim_band_mean.unwrap_or(f64::NAN),
            report.wall_time
        );
    }
    Ok(())
}
