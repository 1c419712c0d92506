use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cassi::container::{read_container, read_cube};
use cassi::experiment::{run_ablation, ExperimentConfig};
use cassi::metrics::quality_report;

const MINIMAL: &str = "
[sensing]
height = 12
width = 12
bands = 1
shots = 1

[phantom]
seed = 1

[shots]
mode = random
p = 1.0

[solver]
algorithm = rnd
phases = 2
lambda = 0
";

const SMALL: &str = "
# two content-aware shots with shot noise
[sensing]
height = 16
width = 16
bands = 4
step = 1
shots = 2

[phantom]
seed = 4

[shots]
mode = content_aware
seed = 9

[noise]
kind = shot11
seed = 2

[solver]
algorithm = rnd
phases = 8
lambda = 0.01

[output]
scene = small
band_images = true
";

fn cassi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cassi")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimal_config_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.cfg", MINIMAL);
    let out = dir.path().join("out");
    let o = cassi(&["pipeline", "--config", s(&cfg), "--out", s(&out), "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "scene,algorithm,shots,K,mse,psnr_cube,psnr_band_mean,ssim");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[..6], ["scene", "rnd", "1", "2", "0", "inf"]);
    assert_eq!(row[7], "1");
}

#[test]
fn pipeline_outputs_are_consistent_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = cassi(&["pipeline", "--config", s(&cfg), "--out", s(out), "--quiet"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 11);
    for name in &names {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name:?}");
        if name.to_str().unwrap().ends_with(".hsc") {
            read_container(a.join(name)).unwrap();
        }
    }

    let truth = read_cube(a.join("truth.hsc")).unwrap();
    let recovered = read_cube(a.join("recovered.hsc")).unwrap();
    let q = quality_report(&truth, &recovered).unwrap();
    let csv = std::fs::read_to_string(a.join("metrics.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "small");
    assert!((row[5].parse::<f64>().unwrap() - q.psnr_cube).abs() <= 1e-9);
    assert!((row[6].parse::<f64>().unwrap() - q.psnr_band_mean).abs() <= 1e-9);

    let pgm = std::fs::read(a.join("recovered_band_01.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n65535\n"));
    assert_eq!(std::fs::read_to_string(a.join("iterations.csv")).unwrap().lines().count(), 9);
}

#[test]
fn config_errors_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "[sensing]\nheight = 4\nwidth = 4\nbands = two\n");
    let o = cassi(&["pipeline", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let cfg = write_config(dir.path(), "min.cfg", MINIMAL);
    let o = cassi(&["pipeline", "--config", s(&cfg), "--set", "solver.algorithm=fista"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let o = cassi(&[
        "pipeline",
        "--config",
        s(&cfg),
        "--out",
        s(&dir.path().join("o")),
        "--set",
        "solver.algorithm=ista",
        "--set",
        "solver.rho=1e200",
        "--set",
        "solver.prox=identity",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn oracle_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.cfg", MINIMAL);
    let tiny = [
        "--set", "sensing.height=4", "--set", "sensing.width=5", "--set", "sensing.bands=3", "--set",
        "sensing.shots=2", "--set", "shots.p=0.5",
    ];
    let mut args = vec!["oracle", "--config", s(&cfg)];
    args.extend(tiny);
    let o = cassi(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 5);

    let o = cassi(&["oracle", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout).to_string();
    assert!(text.lines().all(|l| l.contains("= 0.000e0")), "{text}");

    let o = cassi(&["oracle", "--config", s(&cfg), "--corrupt-adjoint"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));

    let o = cassi(&["oracle", "--config", s(&cfg), "--cap", "100"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn staged_commands_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let out = dir.path().join("staged");
    for cmd in ["phantom", "mask", "sample"] {
        let o = cassi(&[cmd, "--config", s(&cfg), "--out", s(&out), "--quiet"]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(
        read_cube(out.join("phantom.hsc")).unwrap(),
        read_cube(out.join("truth.hsc")).unwrap()
    );
    let rec = dir.path().join("rec");
    let o = cassi(&[
        "reconstruct",
        "--config", s(&cfg),
        "--out", s(&rec),
        "--measurements", s(&out.join("measurements.hsc")),
        "--mask", s(&out.join("mask_1.hsc")),
        "--mask", s(&out.join("mask_2.hsc")),
        "--truth", s(&out.join("truth.hsc")),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let pipe = dir.path().join("pipe");
    assert!(cassi(&["pipeline", "--config", s(&cfg), "--out", s(&pipe), "--quiet"]).status.success());
    assert_eq!(
        std::fs::read(rec.join("recovered.hsc")).unwrap(),
        std::fs::read(pipe.join("recovered.hsc")).unwrap()
    );

    let o = cassi(&[
        "metrics",
        "--reference", s(&out.join("truth.hsc")),
        "--estimate", s(&rec.join("recovered.hsc")),
        "--scene", "small",
        "--algorithm", "rnd",
        "--shots", "2",
        "--phases", "8",
    ]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        std::fs::read_to_string(pipe.join("metrics.csv")).unwrap()
    );
}

#[test]
fn every_subcommand_has_help() {
    for cmd in ["phantom", "mask", "sample", "reconstruct", "metrics", "oracle", "pipeline"] {
        let o = cassi(&[cmd, "--help"]);
        assert!(o.status.success(), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("Usage"));
    }
}

#[test]
fn seed_flag_changes_the_scene() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(cassi(&["phantom", "--config", s(&cfg), "--out", s(&a), "--seed", "1"]).status.success());
    assert!(cassi(&["phantom", "--config", s(&cfg), "--out", s(&b), "--seed", "2"]).status.success());
    assert_ne!(std::fs::read(a.join("phantom.hsc")).unwrap(), std::fs::read(b.join("phantom.hsc")).unwrap());
}

#[test]
fn ablation_pack_ordering() {
    let cfg = ExperimentConfig::parse(
        "
[sensing]
height = 64
width = 64
bands = 8
shots = 2
[phantom]
seed = 100
[shots]
mode = content_aware
seed = 1000
[solver]
algorithm = rnd
phases = 100
lambda = 0.02
[output]
csv = false
",
        &[],
    )
    .unwrap();
    let rows = run_ablation(&cfg).unwrap();
    let p: Vec<f64> = rows.iter().map(|r| r.quality.psnr_cube).collect();
    assert_eq!(rows.iter().map(|r| r.shots).collect::<Vec<_>>(), vec![1, 2, 2]);
    assert!(p[0] <= p[1] + 0.1 && p[1] <= p[2] + 0.1, "{p:?}");
}
