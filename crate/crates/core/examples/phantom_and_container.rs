//! Generate a seeded phantom cube, store it as HSC1 and read it back.
//!
//! cargo run --example phantom_and_container

use cassi::container::{read_cube, write_container, Dtype};
use cassi::phantom::{make_phantom, PhantomSpec};
use cassi::SensingConfig;

fn main() -> cassi::Result<()> {
    let cfg = SensingConfig::new(32, 32, 8, 1, 1)?;
    let spec = PhantomSpec::default_for(&cfg, 7);
    let cube = make_phantom(&spec, &cfg);

    for c in 0..cube.bands() {
        let band = cube.band(c);
        let mean = band.iter().sum::<f64>() / band.len() as f64;
        let max = band.iter().cloned().fold(0.0, f64::max);
        println!("band {c}: mean {mean:.4}  max {max:.4}");
    }

    let dir = std::env::temp_dir().join("cassi-example");
    std::fs::create_dir_all(&dir).map_err(|e| cassi::Error::io(&dir, e))?;
    for (dtype, name) in [(Dtype::F64, "phantom_f64.hsc"), (Dtype::F32, "phantom_f32.hsc")] {
        let path = dir.join(name);
        write_container(&cube.clone().into(), &path, dtype)?;
        let back = read_cube(&path)?;
        println!("{name}: max |diff| after roundtrip = {:.3e}", back.max_abs_diff(&cube)?);
    }
    Ok(())
}
