#![allow(dead_code)]

pub mod oracles;

use std::path::PathBuf;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torquescore::{GeneralizedState, KinematicModel};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn model(name: &str) -> KinematicModel {
    KinematicModel::load(fixture(name)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random state with Euler angles kept away from gimbal lock.
pub fn random_state(model: &KinematicModel, rng: &mut impl Rng) -> GeneralizedState {
    let n = model.dof();
    let q = DVector::from_fn(n, |i, _| {
        if i < 3 {
            rng.gen_range(-1.0..1.0)
        } else if (i - 3) % 3 == 1 {
            rng.gen_range(-1.2..1.2)
        } else {
            rng.gen_range(-3.0..3.0)
        }
    });
    let qd = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
    let qdd = DVector::from_fn(n, |_, _| rng.gen_range(-5.0..5.0));
    GeneralizedState::new(q, qd, qdd).unwrap()
}
