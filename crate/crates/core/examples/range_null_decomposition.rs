//! Split a cube into its measured (range) and invisible (null) parts and
//! show that any null-space content leaves the measurement unchanged.
//!
//! cargo run --example range_null_decomposition

use cassi::optics::{forward, PseudoInverse, DEFAULT_RCOND};
use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::sampling::random_mask;
use cassi::{HyperCube, SensingConfig};

fn main() -> cassi::Result<()> {
    let cfg = SensingConfig::new(24, 24, 4, 1, 1)?;
    let x = make_phantom(&PhantomSpec::default_for(&cfg, 3), &cfg);
    let apertures = vec![random_mask(&cfg, 0.5, 5)?];
    let pinv = PseudoInverse::new(&apertures, &cfg, DEFAULT_RCOND)?;

    let range = pinv.project_range(&x)?;
    let null = pinv.project_null(&x)?;
    println!("|x - (Pr x + Pn x)|_inf = {:.3e}", x.max_abs_diff(&range.add(&null)?)?);
    println!("energy: range {:.3}  null {:.3}", range.dot(&range)?, null.dot(&null)?);

    let y = forward(&x, &apertures, &cfg)?;
    let x0 = pinv.apply(&y)?;
    let s = HyperCube::from_fn(cfg.bands, cfg.height, cfg.width, |c, h, w| ((c + 2 * h + 3 * w) % 7) as f64);
    let candidate = x0.add(&pinv.project_null(&s)?)?;
    let y2 = forward(&candidate, &apertures, &cfg)?;
    println!("|Phi(Phi^+ y + Pn s) - y|_inf = {:.3e}", y2.max_abs_diff(&y)?);
    Ok(())
}
