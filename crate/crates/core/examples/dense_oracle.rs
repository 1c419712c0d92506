//! Check the matrix-free operators against an explicit dense Phi.
//!
//! cargo run --example dense_oracle

use cassi::experiment::{run_oracle, ExperimentConfig, OracleOptions};

const CONFIG: &str = "
[sensing]
height = 4
width = 5
bands = 3
step = 1
shots = 2

[phantom]
seed = 1

[shots]
mode = random
seed = 2
";

fn main() -> cassi::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG, &[])?;
    let report = run_oracle(&cfg, OracleOptions::default())?;
    print!("{}", report.to_text());
    println!("passed: {}", report.passed());
    Ok(())
}
