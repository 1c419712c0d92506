use std::sync::Arc;

use super::prox::{ProxOperator, TvProx};
use crate::cube::HyperCube;
use crate::error::{Error, Result};
use crate::optics::{EnhancedMode, DEFAULT_RCOND};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Ista,
    GapTv,
    Rnd,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Ista => "ista",
            Algorithm::GapTv => "gap_tv",
            Algorithm::Rnd => "rnd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `0.95 / ||Phi||^2` from power iteration.
    Auto,
    Fixed(f64),
}

/// Which pseudo-inverse realizes `Phi^+` inside the RND step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PinvMode {
    #[default]
    Exact,
    /// Rectify-crop-slide with rectification weights `E`.
    Appendix,
}

/// How multi-shot RND combines shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FusionMode {
    /// One pseudo-inverse per shot, then a weighted sum of the per-shot
    /// updates.
    #[default]
    PerShot,
    /// One pseudo-inverse of the stacked operator.
    Joint,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum FusionWeights {
    /// `1 / N` for every shot.
    #[default]
    Uniform,
    PerShot(Vec<f64>),
    /// `weights[k][i]` for phase `k + 1`, shot `i + 1`.
    PerPhase(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Initialization {
    Adjoint,
    /// Pseudo-inverse of shot 1 under the configured [`PinvMode`].
    #[default]
    Pinv,
    Zero,
    Given(HyperCube),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub phases: usize,
    /// ISTA step.
    pub step: StepSize,
    /// RND per-phase step; missing entries default to 1.
    pub phase_steps: Vec<f64>,
    pub lambda: f64,
    pub prox: Arc<dyn ProxOperator>,
    pub fusion_weights: FusionWeights,
    pub fusion: FusionMode,
    pub pinv: PinvMode,
    pub enhanced: EnhancedMode,
    pub rcond: f64,
    pub init: Initialization,
    pub power_iterations: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, phases: usize) -> Self {
        Self {
            algorithm,
            phases,
            step: StepSize::Auto,
            phase_steps: Vec::new(),
            lambda: 0.01,
            prox: Arc::new(TvProx::default()),
            fusion_weights: FusionWeights::Uniform,
            fusion: FusionMode::PerShot,
            pinv: PinvMode::Exact,
            enhanced: EnhancedMode::Masked,
            rcond: DEFAULT_RCOND,
            init: Initialization::Pinv,
            power_iterations: 50,
            seed: 0,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_prox(mut self, prox: Arc<dyn ProxOperator>) -> Self {
        self.prox = prox;
        self
    }

    pub fn with_init(mut self, init: Initialization) -> Self {
        self.init = init;
        self
    }

    pub fn with_step(mut self, step: StepSize) -> Self {
        self.step = step;
        self
    }

    pub fn validate(&self, shots: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.phases == 0 {
            return bad("phase count must be positive".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if let StepSize::Fixed(r) = self.step {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("step must be positive, got {r}"));
            }
        }
        if self.phase_steps.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return bad("per-phase steps must be positive".into());
        }
        if !(self.rcond >= 0.0 && self.rcond.is_finite()) {
            return bad(format!("rcond must be >= 0, got {}", self.rcond));
        }
        if self.power_iterations == 0 {
            return bad("power iterations must be positive".into());
        }
        match &self.fusion_weights {
            FusionWeights::Uniform => {}
            FusionWeights::PerShot(w) => {
                if w.len() != shots {
                    return Err(Error::shape("fusion weights", shots, w.len()));
                }
            }
            FusionWeights::PerPhase(ws) => {
                if ws.len() != self.phases {
                    return Err(Error::shape("per-phase fusion weights", self.phases, ws.len()));
                }
                if let Some(w) = ws.iter().find(|w| w.len() != shots) {
                    return Err(Error::shape("fusion weights", shots, w.len()));
                }
            }
        }
        Ok(())
    }

    /// Step of phase `k` (one-based) for RND.
    pub fn phase_step(&self, k: usize) -> f64 {
        self.phase_steps.get(k - 1).copied().unwrap_or(1.0)
    }

    /// Fusion weights of phase `k` (one-based).
    pub fn weights(&self, k: usize, shots: usize) -> Vec<f64> {
        match &self.fusion_weights {
            FusionWeights::Uniform => vec![1.0 / shots as f64; shots],
            FusionWeights::PerShot(w) => w.clone(),
            FusionWeights::PerPhase(ws) => ws[k - 1].clone(),
        }
    }
}
