//! Inputs shared by the benchmarks under `benches/`.

use torquescore::motion::estimate_derivatives;
use torquescore::rigidbody::default_humanoid;
use torquescore::{synthetic, GeneralizedState, KinematicModel, MotionSequence};

pub const CLIP_FRAMES: usize = 100;

pub struct Workload {
    pub model: KinematicModel,
    pub clip: MotionSequence,
}

impl Workload {
    /// The default humanoid and a 100-frame fast-spin clip with derivatives.
    pub fn humanoid() -> Self {
        let model = default_humanoid();
        let clip = estimate_derivatives(&synthetic::fast_spin(&model, CLIP_FRAMES)).expect("clip is long enough");
        Self { model, clip }
    }

    pub fn state(&self, frame: usize) -> GeneralizedState {
        self.clip.state(frame).expect("derivatives are present")
    }
}
