//! Motion difficulty scoring from rigid-body torque sensitivity.
//!
//! The pipeline runs per clip: estimate derivatives of the pose track, take
//! finite-difference Jacobians of per-joint torque magnitudes with respect to
//! the full state of every frame, and reduce them to spectral, variance and
//! segment diversity. Dataset-level analytics live in [`analysis`].

pub mod analysis;
pub mod difficulty;
pub mod error;
pub mod motion;
pub mod numeric;
pub mod perturbation;
pub mod pipeline;
pub mod rigidbody;
pub mod synthetic;

pub use difficulty::{DifficultyBreakdown, DiversityWeights, SpectralMode};
pub use error::{Error, Result};
pub use motion::{Clip, ClipManifest, ManifestRow, MotionSequence};
pub use perturbation::{FrameJacobian, PerturbationConfig, PerturbationScope, StackedJacobian};
pub use pipeline::{clip_jacobians, score_clip, score_frames, ScoreConfig, ScoreRow};
pub use rigidbody::{GeneralizedState, JointSpec, KinematicModel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
