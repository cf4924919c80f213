//! Clip scoring end to end and the score row format.

use serde::{Deserialize, Serialize};

use crate::difficulty::{compute_mds, DifficultyBreakdown, DiversityWeights, SpectralMode, DEFAULT_SEGMENTS};
use crate::error::{Error, Result};
use crate::motion::{estimate_derivatives, MotionSequence};
use crate::perturbation::{sequence_jacobians, FrameJacobian, PerturbationConfig, PerturbationScope};
use crate::rigidbody::KinematicModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub perturbation: PerturbationConfig,
    pub weights: DiversityWeights,
    pub segments: usize,
    pub spectral_mode: SpectralMode,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            perturbation: PerturbationConfig::default(),
            weights: DiversityWeights::default(),
            segments: DEFAULT_SEGMENTS,
            spectral_mode: SpectralMode::Stacked,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        self.perturbation.validate()?;
        self.weights.validate()?;
        if self.segments == 0 {
            return Err(Error::InvalidConfig("segment count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Scores one clip. Derivatives are estimated first when the clip has none.
pub fn score_clip(model: &KinematicModel, clip: &MotionSequence, cfg: &ScoreConfig) -> Result<DifficultyBreakdown> {
    let frames = clip_jacobians(model, clip, cfg)?;
    score_frames(&frames, cfg)
}

/// Reduces precomputed frame Jacobians to the difficulty components.
pub fn score_frames(frames: &[FrameJacobian], cfg: &ScoreConfig) -> Result<DifficultyBreakdown> {
    compute_mds(
        frames,
        &cfg.weights,
        cfg.segments,
        cfg.perturbation.singular_floor,
        cfg.spectral_mode,
    )
}

/// Per-frame Jacobians of a clip, estimating derivatives when absent.
pub fn clip_jacobians(model: &KinematicModel, clip: &MotionSequence, cfg: &ScoreConfig) -> Result<Vec<FrameJacobian>> {
    cfg.validate()?;
    if clip.dof() != model.dof() {
        return Err(Error::DimensionMismatch {
            expected: model.dof(),
            actual: clip.dof(),
            context: "clip frame length vs model dof",
        });
    }
    let estimated;
    let clip = if clip.has_derivatives() {
        clip
    } else {
        estimated = estimate_derivatives(clip)?;
        &estimated
    };
    sequence_jacobians(model, clip, &cfg.perturbation)
}

/// One line of score output. Every row repeats the configuration it was
/// produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub clip_id: String,
    pub t: usize,
    #[serde(rename = "J")]
    pub joints: usize,
    #[serde(rename = "D")]
    pub directions: usize,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub mds: Option<f64>,
    pub degenerate_fraction: Option<f64>,
    #[serde(rename = "K")]
    pub segments: usize,
    pub weights: String,
    pub eps_q: f64,
    pub eps_qdot: f64,
    pub eps_qddot: f64,
    pub delta: f64,
    pub singular_floor: f64,
    pub scope: PerturbationScope,
    pub spectral_mode: SpectralMode,
    pub version: String,
    pub status: String,
}

impl ScoreRow {
    pub fn new(
        clip_id: impl Into<String>,
        clip: &MotionSequence,
        model: &KinematicModel,
        cfg: &ScoreConfig,
        outcome: &Result<DifficultyBreakdown>,
    ) -> Self {
        let [eps_q, eps_qdot, eps_qddot] = cfg.perturbation.steps(clip.fps);
        let b = outcome.as_ref().ok();
        Self {
            clip_id: clip_id.into(),
            t: clip.len(),
            joints: model.joint_count(),
            directions: cfg.perturbation.directions(model),
            d1: b.map(|b| b.d1),
            d2: b.map(|b| b.d2),
            d3: b.map(|b| b.d3),
            mds: b.map(|b| b.mds),
            degenerate_fraction: b.map(|b| b.degenerate_fraction),
            segments: cfg.segments,
            weights: cfg.weights.to_string(),
            eps_q,
            eps_qdot,
            eps_qddot,
            delta: cfg.perturbation.delta,
            singular_floor: cfg.perturbation.singular_floor,
            scope: cfg.perturbation.scope,
            spectral_mode: cfg.spectral_mode,
            version: crate::VERSION.to_string(),
            status: match outcome {
                Ok(_) => "ok".to_string(),
                Err(e) => format!("failed: {e}"),
            },
        }
    }
}
