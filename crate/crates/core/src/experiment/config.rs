//! Plain-text experiment configuration.
//!
//! ```text
//! # comment
//! [sensing]
//! height = 32
//! width = 32
//! ```
//!
//! Values may be overridden with `section.key=value` strings (the CLI's
//! `--set`). Unknown sections and keys are rejected with their line number.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::cube::SensingConfig;
use crate::error::{Error, Result};
use crate::optics::{EnhancedMode, DEFAULT_RCOND};
use crate::phantom::PhantomSpec;
use crate::recon::{
    Algorithm, FusionMode, FusionWeights, IdentityProx, Initialization, PinvMode, SolverConfig, StepSize, TvProx,
    DEFAULT_TV_ITERATIONS,
};
use crate::sampling::{NoiseKind, NoiseModel, DEFAULT_ETA, DEFAULT_FULL_SCALE};

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("sensing", &["height", "width", "bands", "step", "shots"]),
    ("phantom", &["seed", "blobs", "background", "spectral_sigma", "radius_min", "radius_max"]),
    ("input", &["cube"]),
    ("shots", &["mode", "seed", "p", "masks", "shared", "eta", "layer1", "layer2", "layer3"]),
    ("noise", &["kind", "sigma", "full_scale", "seed"]),
    (
        "solver",
        &[
            "algorithm", "phases", "rho", "rho_phases", "lambda", "prox", "tv_iterations", "weights", "pinv",
            "fusion", "rcond", "init", "enhanced", "power_iterations", "seed",
        ],
    ),
    ("output", &["dir", "scene", "cubes", "masks", "band_images", "csv"]),
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    /// 0 for command-line overrides.
    line: usize,
}

/// Raw `section.key -> value` table with source line numbers.
#[derive(Debug, Clone, Default)]
pub struct ConfigDoc {
    entries: BTreeMap<(String, String), Entry>,
    sections: BTreeSet<String>,
    base_dir: Option<PathBuf>,
}

fn validate_key(section: &str, key: &str, line: usize) -> Result<()> {
    let Some((_, keys)) = KNOWN_KEYS.iter().find(|(s, _)| *s == section) else {
        return Err(Error::Config {
            line,
            msg: format!("unknown section [{section}]"),
        });
    };
    if !keys.contains(&key) {
        return Err(Error::Config {
            line,
            msg: format!("unknown key `{key}` in [{section}]"),
        });
    }
    Ok(())
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line,
                    msg: format!("malformed section header `{content}`"),
                })?;
                let name = name.trim().to_string();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(Error::Config {
                        line,
                        msg: format!("unknown section [{name}]"),
                    });
                }
                doc.sections.insert(name.clone());
                section = Some(name);
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let section = section.clone().ok_or_else(|| Error::Config {
                line,
                msg: "key outside of any [section]".into(),
            })?;
            let key = key.trim().to_string();
            validate_key(&section, &key, line)?;
            if doc.entries.contains_key(&(section.clone(), key.clone())) {
                return Err(Error::Config {
                    line,
                    msg: format!("duplicate key `{section}.{key}`"),
                });
            }
            doc.entries.insert(
                (section, key),
                Entry {
                    value: value.trim().to_string(),
                    line,
                },
            );
        }
        Ok(doc)
    }

    /// Reads a file; relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut doc = Self::parse(&text)?;
        doc.base_dir = path.parent().map(Path::to_path_buf);
        Ok(doc)
    }

    /// Applies a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let bad = |msg: String| Error::Config { line: 0, msg };
        let (lhs, value) = assignment
            .split_once('=')
            .ok_or_else(|| bad(format!("override `{assignment}` is not section.key=value")))?;
        let (section, key) = lhs
            .trim()
            .split_once('.')
            .ok_or_else(|| bad(format!("override key `{lhs}` is not section.key")))?;
        validate_key(section, key, 0)?;
        self.sections.insert(section.to_string());
        self.entries.insert(
            (section.to_string(), key.to_string()),
            Entry {
                value: value.trim().to_string(),
                line: 0,
            },
        );
        Ok(())
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains(section)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(|e| e.value.as_str())
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map_or(0, |e| e.line)
    }

    fn err(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config {
            line: self.line_of(section, key),
            msg: format!("{section}.{key}: {msg}"),
        }
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| self.err(section, key, format!("cannot parse `{v}`: {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(section, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key)?.ok_or_else(|| Error::Config {
            line: 0,
            msg: format!("missing required key {section}.{key}"),
        })
    }

    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>()
                        .map_err(|e| self.err(section, key, format!("cannot parse `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn flag(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        match self.raw(section, key) {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(self.err(section, key, format!("expected a boolean, got `{v}`"))),
        }
    }

    fn choice<'a>(&self, section: &str, key: &str, default: &'a str, options: &[&'a str]) -> Result<&'a str> {
        let value = self.raw(section, key).unwrap_or(default);
        options
            .iter()
            .find(|o| **o == value)
            .copied()
            .ok_or_else(|| self.err(section, key, format!("expected one of {options:?}, got `{value}`")))
    }

    pub fn path(&self, raw: &str) -> PathBuf {
        let p = PathBuf::from(raw);
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SceneSource {
    Phantom(PhantomSpec),
    Cube(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeName {
    Fixed,
    Complementary,
    Random,
    ContentAware,
}

/// How shared masks are generated for content-aware plans without mask files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharedInit {
    Random,
    Complementary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotsSection {
    pub mode: ModeName,
    pub seed: u64,
    pub p: f64,
    pub masks: Vec<PathBuf>,
    pub shared: SharedInit,
    pub eta: Vec<f64>,
    pub layers: [Option<PathBuf>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub scene: String,
    pub cubes: bool,
    pub masks: bool,
    pub band_images: bool,
    pub csv: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub sensing: SensingConfig,
    /// `None` is allowed for commands that never need a scene.
    pub scene: Option<SceneSource>,
    pub shots: ShotsSection,
    pub noise: NoiseModel,
    pub solver: SolverConfig,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let sensing = SensingConfig::new(
            doc.require("sensing", "height")?,
            doc.require("sensing", "width")?,
            doc.require("sensing", "bands")?,
            doc.get_or("sensing", "step", 1)?,
            doc.get_or("sensing", "shots", 1)?,
        )
        .map_err(|e| Error::Config {
            line: doc.line_of("sensing", "height"),
            msg: e.to_string(),
        })?;

        let scene = match (doc.has_section("phantom"), doc.raw("input", "cube")) {
            (true, Some(_)) => {
                return Err(Error::Config {
                    line: doc.line_of("input", "cube"),
                    msg: "give either [phantom] or input.cube, not both".into(),
                })
            }
            (false, Some(p)) => Some(SceneSource::Cube(doc.path(p))),
            (true, None) => {
                let seed = doc.get_or("phantom", "seed", 0u64)?;
                let base = PhantomSpec::default_for(&sensing, seed);
                let (rmin, rmax) = base.radius();
                let spec = PhantomSpec::new(
                    seed,
                    doc.get_or("phantom", "blobs", base.blobs())?,
                    doc.get_or("phantom", "background", base.background())?,
                    doc.get_or("phantom", "spectral_sigma", base.spectral_sigma())?,
                    (doc.get_or("phantom", "radius_min", rmin)?, doc.get_or("phantom", "radius_max", rmax)?),
                )
                .map_err(|e| Error::Config {
                    line: doc.line_of("phantom", "seed"),
                    msg: e.to_string(),
                })?;
                Some(SceneSource::Phantom(spec))
            }
            (false, None) => None,
        };

        let mode = match doc.choice("shots", "mode", "random", &["fixed", "complementary", "random", "content_aware"])? {
            "fixed" => ModeName::Fixed,
            "complementary" => ModeName::Complementary,
            "content_aware" => ModeName::ContentAware,
            _ => ModeName::Random,
        };
        let shared = match doc.choice("shots", "shared", "random", &["random", "complementary"])? {
            "complementary" => SharedInit::Complementary,
            _ => SharedInit::Random,
        };
        let eta = doc.list("shots", "eta")?.unwrap_or_else(|| vec![DEFAULT_ETA]);
        let eta = match eta.len() {
            1 => vec![eta[0]; sensing.shots],
            n if n == sensing.shots => eta,
            n => {
                return Err(doc.err("shots", "eta", format!("expected 1 or {} values, got {n}", sensing.shots)))
            }
        };
        let masks: Vec<PathBuf> = doc
            .list::<String>("shots", "masks")?
            .unwrap_or_default()
            .iter()
            .map(|p| doc.path(p))
            .collect();
        if mode == ModeName::Fixed && masks.len() != sensing.shots {
            return Err(doc.err(
                "shots",
                "masks",
                format!("fixed mode needs {} mask files, got {}", sensing.shots, masks.len()),
            ));
        }
        let layer = |k: &str| doc.raw("shots", k).map(|p| doc.path(p));
        let shots = ShotsSection {
            mode,
            seed: doc.get_or("shots", "seed", 0)?,
            p: doc.get_or("shots", "p", 0.5)?,
            masks,
            shared,
            eta,
            layers: [layer("layer1"), layer("layer2"), layer("layer3")],
        };

        let noise_seed = doc.get_or("noise", "seed", 0u64)?;
        let noise_kind = match doc.choice("noise", "kind", "none", &["none", "gaussian", "shot11"])? {
            "gaussian" => NoiseKind::Gaussian {
                sigma: doc.get_or("noise", "sigma", 0.0)?,
            },
            "shot11" => NoiseKind::Shot {
                full_scale: doc.get_or("noise", "full_scale", DEFAULT_FULL_SCALE)?,
            },
            _ => NoiseKind::None,
        };
        let noise = NoiseModel::new(noise_kind, noise_seed).map_err(|e| Error::Config {
            line: doc.line_of("noise", "kind"),
            msg: e.to_string(),
        })?;

        let solver = solver_from_doc(doc, sensing.shots)?;

        let output = OutputSection {
            dir: doc.raw("output", "dir").map(|p| doc.path(p)).unwrap_or_else(|| PathBuf::from("out")),
            scene: doc.raw("output", "scene").unwrap_or("scene").to_string(),
            cubes: doc.flag("output", "cubes", true)?,
            masks: doc.flag("output", "masks", true)?,
            band_images: doc.flag("output", "band_images", false)?,
            csv: doc.flag("output", "csv", true)?,
        };

        Ok(Self {
            sensing,
            scene,
            shots,
            noise,
            solver,
            output,
        })
    }

    pub fn load(path: impl AsRef<Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = ConfigDoc::load(path)?;
        for o in overrides {
            doc.set(o)?;
        }
        Self::from_doc(&doc)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc = ConfigDoc::parse(text)?;
        for o in overrides {
            doc.set(o)?;
        }
        Self::from_doc(&doc)
    }
}

fn solver_from_doc(doc: &ConfigDoc, shots: usize) -> Result<SolverConfig> {
    let algorithm = match doc.choice("solver", "algorithm", "rnd", &["ista", "gap_tv", "rnd"])? {
        "ista" => Algorithm::Ista,
        "gap_tv" => Algorithm::GapTv,
        _ => Algorithm::Rnd,
    };
    let mut s = SolverConfig::new(algorithm, doc.get_or("solver", "phases", 10)?);
    s.step = match doc.raw("solver", "rho") {
        None | Some("auto") => StepSize::Auto,
        Some(_) => StepSize::Fixed(doc.require("solver", "rho")?),
    };
    s.phase_steps = doc.list("solver", "rho_phases")?.unwrap_or_default();
    s.lambda = doc.get_or("solver", "lambda", s.lambda)?;
    let tv_iterations = doc.get_or("solver", "tv_iterations", DEFAULT_TV_ITERATIONS)?;
    s.prox = match doc.choice("solver", "prox", "tv", &["tv", "identity"])? {
        "identity" => Arc::new(IdentityProx),
        _ => Arc::new(TvProx {
            iterations: tv_iterations,
        }),
    };
    if let Some(w) = doc.list::<f64>("solver", "weights")? {
        s.fusion_weights = FusionWeights::PerShot(w);
    }
    s.pinv = match doc.choice("solver", "pinv", "exact", &["exact", "appendix"])? {
        "appendix" => PinvMode::Appendix,
        _ => PinvMode::Exact,
    };
    s.fusion = match doc.choice("solver", "fusion", "per_shot", &["per_shot", "joint"])? {
        "joint" => FusionMode::Joint,
        _ => FusionMode::PerShot,
    };
    s.rcond = doc.get_or("solver", "rcond", DEFAULT_RCOND)?;
    s.init = match doc.choice("solver", "init", "pinv", &["adjoint", "pinv", "zero"])? {
        "adjoint" => Initialization::Adjoint,
        "zero" => Initialization::Zero,
        _ => Initialization::Pinv,
    };
    s.enhanced = match doc.choice("solver", "enhanced", "masked", &["masked", "uniform"])? {
        "uniform" => EnhancedMode::Uniform,
        _ => EnhancedMode::Masked,
    };
    s.power_iterations = doc.get_or("solver", "power_iterations", s.power_iterations)?;
    s.seed = doc.get_or("solver", "seed", 0)?;
    s.validate(shots).map_err(|e| Error::Config {
        line: doc.line_of("solver", "algorithm"),
        msg: e.to_string(),
    })?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[sensing]
height = 4
width = 4
bands = 2
[phantom]
seed = 3
";

    #[test]
    fn parses_minimal() {
        let cfg = ExperimentConfig::parse(MINIMAL, &[]).unwrap();
        assert_eq!(cfg.sensing.measurement_width(), 5);
        assert!(matches!(cfg.scene, Some(SceneSource::Phantom(_))));
        assert_eq!(cfg.solver.algorithm, Algorithm::Rnd);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "[sensing]\nheight = 4\nwidth = four\nbands = 2\n[phantom]\n";
        match ExperimentConfig::parse(text, &[]).unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        match ConfigDoc::parse("[sensing]\nheight = 4\ncolour = red\n").unwrap_err() {
            Error::Config { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("colour"));
            }
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(ConfigDoc::parse("x = 1\n"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn overrides_win() {
        let cfg = ExperimentConfig::parse(MINIMAL, &["sensing.bands=3".into(), "solver.algorithm = ista".into()]).unwrap();
        assert_eq!(cfg.sensing.bands, 3);
        assert_eq!(cfg.solver.algorithm, Algorithm::Ista);
        assert!(ExperimentConfig::parse(MINIMAL, &["nosuch.key=1".into()]).is_err());
    }

    #[test]
    fn scene_source_exclusive() {
        let text = format!("{MINIMAL}[input]\ncube = a.hsc\n");
        assert!(ExperimentConfig::parse(&text, &[]).is_err());
        let text = "[sensing]\nheight = 4\nwidth = 4\nbands = 2\n";
        assert!(ExperimentConfig::parse(text, &[]).unwrap().scene.is_none());
    }
}
