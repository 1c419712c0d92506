//! One fixed shot vs two fixed shots vs two content-aware shots on the same
//! scene and solver budget.
//!
//! cargo run --release --example ablation

use cassi::experiment::{run_ablation, ExperimentConfig};

const CONFIG: &str = "
[sensing]
height = 64
width = 64
bands = 8
step = 1
shots = 2

[phantom]
seed = 100

[shots]
mode = content_aware
seed = 1000
eta = 0.1

[solver]
algorithm = rnd
phases = 100
lambda = 0.02

[output]
scene = phantom100
csv = false
";

fn main() -> cassi::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG, &[])?;
    for row in run_ablation(&cfg)? {
        println!("{:<28} psnr {:.3} dB", row.scene, row.quality.psnr_cube);
    }
    Ok(())
}
