//! Floating-base articulated rigid-body model.

mod dynamics;
pub mod euler;
mod model;

pub use dynamics::{
    bias_term, forward_kinematics, inverse_dynamics, inverse_dynamics_into, mass_matrix, DynamicsWorkspace,
    GeneralizedState, JointPoses, MassMatrix, TorqueVector,
};
pub use model::{JointSpec, KinematicModel, DEFAULT_GRAVITY, MODEL_HEADER};

/// The shipped 24-joint humanoid, embedded at build time.
pub const DEFAULT_HUMANOID: &str = include_str!("../../fixtures/default_humanoid.model");

pub fn default_humanoid() -> KinematicModel {
    KinematicModel::parse(DEFAULT_HUMANOID, "default_humanoid.model").expect("embedded humanoid model is valid")
}
