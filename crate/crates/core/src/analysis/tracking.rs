//! Per-joint position errors between a reference and a tracked motion.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::motion::MotionSequence;
use crate::numeric::exact_sum;
use crate::rigidbody::{forward_kinematics, KinematicModel};

/// Mean global joint position error in millimeters, no alignment.
pub fn mpjpe_g(model: &KinematicModel, reference: &MotionSequence, tracked: &MotionSequence) -> Result<f64> {
    let (a, b) = joint_tracks(model, reference, tracked)?;
    mean_position_error_mm(&a, &b, false)
}

/// As [`mpjpe_g`], after translating each tracked frame so its root coincides
/// with the reference root.
pub fn mpjpe_l(model: &KinematicModel, reference: &MotionSequence, tracked: &MotionSequence) -> Result<f64> {
    let (a, b) = joint_tracks(model, reference, tracked)?;
    mean_position_error_mm(&a, &b, true)
}

type Track = Vec<Vec<Vector3<f64>>>;

fn joint_tracks(
    model: &KinematicModel,
    reference: &MotionSequence,
    tracked: &MotionSequence,
) -> Result<(Track, Track)> {
    if reference.len() != tracked.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: tracked.len(),
        });
    }
    let fk = |seq: &MotionSequence| -> Result<Track> {
        seq.frames
            .iter()
            .map(|q| Ok(forward_kinematics(model, q.as_slice())?.positions))
            .collect()
    };
    Ok((fk(reference)?, fk(tracked)?))
}

/// Mean Euclidean distance over frames and joints, meters in, millimeters
/// out. Joint 0 is taken as the root for alignment.
pub fn mean_position_error_mm(
    reference: &[Vec<Vector3<f64>>],
    tracked: &[Vec<Vector3<f64>>],
    align_root: bool,
) -> Result<f64> {
    if reference.len() != tracked.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: tracked.len(),
        });
    }
    let mut distances = Vec::new();
    for (pa, pb) in reference.iter().zip(tracked) {
        if pa.len() != pb.len() {
            return Err(Error::DimensionMismatch {
                expected: pa.len(),
                actual: pb.len(),
                context: "joint count",
            });
        }
        let shift = match (align_root, pa.first(), pb.first()) {
            (true, Some(ra), Some(rb)) => ra - rb,
            _ => Vector3::zeros(),
        };
        distances.extend(pa.iter().zip(pb).map(|(x, y)| (x - (y + shift)).norm()));
    }
    if distances.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    Ok(1000.0 * exact_sum(distances.iter().copied()) / distances.len() as f64)
}
