//! Procedural motions on the default humanoid, used as test fixtures and for
//! benchmarking.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;

use crate::motion::MotionSequence;
use crate::rigidbody::KinematicModel;

pub const FPS: f64 = 30.0;
pub const STANDING_HEIGHT: f64 = 0.95;

const L_HIP: usize = 1;
const SPINE2: usize = 6;
const L_KNEE: usize = 4;
const R_KNEE: usize = 5;
const L_SHOULDER: usize = 16;
const R_SHOULDER: usize = 17;
const L_ELBOW: usize = 18;
const R_ELBOW: usize = 19;

fn angle_index(joint: usize, axis: usize) -> usize {
    3 + 3 * joint + axis
}

fn generate(
    model: &KinematicModel,
    name: &str,
    frames: usize,
    pose: impl Fn(f64, &mut DVector<f64>),
) -> MotionSequence {
    let frames = (0..frames)
        .map(|i| {
            let mut q = DVector::zeros(model.dof());
            q[2] = STANDING_HEIGHT;
            pose(i as f64 / FPS, &mut q);
            q
        })
        .collect();
    MotionSequence::new(name, FPS, frames).expect("synthetic motion is well formed")
}

/// Upright rest pose held still.
pub fn static_stand(model: &KinematicModel, frames: usize) -> MotionSequence {
    generate(model, "static_stand", frames, |_, _| {})
}

/// Right arm raised to the side, waving slowly from the elbow.
pub fn slow_wave(model: &KinematicModel, frames: usize) -> MotionSequence {
    generate(model, "slow_wave", frames, |t, q| {
        let phase = TAU * 0.5 * t;
        // The right arm points along -x; rotating about +y lifts it.
        q[angle_index(R_SHOULDER, 1)] = 1.1 + 0.15 * phase.sin();
        q[angle_index(R_ELBOW, 2)] = 0.5 + 0.35 * phase.sin();
    })
}

/// Whole-body spin about the vertical axis on one leg, with the free leg
/// swinging and the arms pumping.
pub fn fast_spin(model: &KinematicModel, frames: usize) -> MotionSequence {
    generate(model, "fast_spin", frames, |t, q| {
        let phase = TAU * 2.0 * t;
        let yaw = TAU * 1.5 * t;
        q[0] = 0.05 * (TAU * 1.5 * t).cos();
        q[1] = 0.05 * (TAU * 1.5 * t).sin();
        q[2] = STANDING_HEIGHT + 0.04 * (2.0 * phase).sin();
        // Stored wrapped to (-pi, pi] so ingestion has to unwrap it.
        q[angle_index(0, 2)] = (yaw + PI).rem_euclid(TAU) - PI;
        q[angle_index(0, 0)] = 0.15 * phase.sin();
        q[angle_index(L_HIP, 0)] = -1.0 + 0.6 * phase.sin();
        q[angle_index(L_KNEE, 0)] = 1.2 + 0.5 * phase.cos();
        q[angle_index(R_KNEE, 0)] = 0.2 + 0.1 * phase.sin();
        q[angle_index(SPINE2, 1)] = 0.3 * phase.cos();
        q[angle_index(L_SHOULDER, 1)] = -0.6 + 0.8 * phase.sin();
        q[angle_index(R_SHOULDER, 1)] = 0.6 + 0.8 * phase.cos();
        q[angle_index(L_ELBOW, 2)] = -1.0 + 0.6 * phase.cos();
        q[angle_index(R_ELBOW, 2)] = 1.0 + 0.6 * phase.sin();
    })
}
