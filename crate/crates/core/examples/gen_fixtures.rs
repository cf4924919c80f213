//! Regenerates the files under `fixtures/`.
//!
//! `cargo run -p torquescore-core --example gen_fixtures`

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use torquescore::rigidbody::{JointSpec, KinematicModel};
use torquescore::synthetic;

struct Segment {
    name: &'static str,
    parent: i32,
    offset: [f64; 3],
    mass: f64,
    radius: f64,
    /// Extent for bodies without a natural child (joint frame).
    tip: Option<[f64; 3]>,
}

const fn seg(
    name: &'static str,
    parent: i32,
    offset: [f64; 3],
    mass: f64,
    radius: f64,
    tip: Option<[f64; 3]>,
) -> Segment {
    Segment {
        name,
        parent,
        offset,
        mass,
        radius,
        tip,
    }
}

// 24-joint SMPL topology, z up, x to the body's left, y forward.
// Masses sum to 70 kg.
const HUMANOID: [Segment; 24] = [
    seg("pelvis", -1, [0.0, 0.0, 0.0], 11.0, 0.12, Some([0.25, 0.0, 0.0])),
    seg("l_hip", 0, [0.06, 0.0, -0.09], 8.0, 0.07, None),
    seg("r_hip", 0, [-0.06, 0.0, -0.09], 8.0, 0.07, None),
    seg("spine1", 0, [0.0, 0.0, 0.11], 6.0, 0.12, None),
    seg("l_knee", 1, [0.04, 0.0, -0.38], 3.0, 0.05, None),
    seg("r_knee", 2, [-0.04, 0.0, -0.38], 3.0, 0.05, None),
    seg("spine2", 3, [0.0, 0.0, 0.14], 6.0, 0.12, None),
    seg("l_ankle", 4, [0.0, 0.0, -0.40], 1.0, 0.04, None),
    seg("r_ankle", 5, [0.0, 0.0, -0.40], 1.0, 0.04, None),
    seg("spine3", 6, [0.0, 0.0, 0.06], 8.0, 0.13, None),
    seg("l_foot", 7, [0.0, 0.12, -0.05], 0.3, 0.03, Some([0.0, 0.08, 0.0])),
    seg("r_foot", 8, [0.0, 0.12, -0.05], 0.3, 0.03, Some([0.0, 0.08, 0.0])),
    seg("neck", 9, [0.0, 0.0, 0.21], 1.0, 0.05, None),
    seg("l_collar", 9, [0.07, 0.0, 0.12], 1.0, 0.05, None),
    seg("r_collar", 9, [-0.07, 0.0, 0.12], 1.0, 0.05, None),
    seg("head", 12, [0.0, 0.05, 0.09], 4.2, 0.09, Some([0.0, 0.0, 0.22])),
    seg("l_shoulder", 13, [0.12, 0.0, 0.03], 1.9, 0.045, None),
    seg("r_shoulder", 14, [-0.12, 0.0, 0.03], 1.9, 0.045, None),
    seg("l_elbow", 16, [0.26, 0.0, 0.0], 1.1, 0.04, None),
    seg("r_elbow", 17, [-0.26, 0.0, 0.0], 1.1, 0.04, None),
    seg("l_wrist", 18, [0.25, 0.0, 0.0], 0.45, 0.035, None),
    seg("r_wrist", 19, [-0.25, 0.0, 0.0], 0.45, 0.035, None),
    seg("l_hand", 20, [0.08, 0.0, 0.0], 0.15, 0.025, Some([0.1, 0.0, 0.0])),
    seg("r_hand", 21, [-0.08, 0.0, 0.0], 0.15, 0.025, Some([-0.1, 0.0, 0.0])),
];

/// Solid ellipsoid with one semi-axis of `length / 2` along `axis` and two of
/// `radius`.
fn ellipsoid_inertia(mass: f64, axis: Vector3<f64>, radius: f64) -> Matrix3<f64> {
    let len = axis.norm();
    let a = len / 2.0;
    let along = mass / 5.0 * (2.0 * radius * radius);
    let across = mass / 5.0 * (a * a + radius * radius);
    let u = axis / len;
    Matrix3::identity() * across + u * u.transpose() * (along - across)
}

fn humanoid() -> KinematicModel {
    let joints = HUMANOID
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let extent = match s.tip {
                Some(t) => Vector3::from(t),
                None => {
                    let children: Vec<Vector3<f64>> = HUMANOID
                        .iter()
                        .filter(|c| c.parent == i as i32)
                        .map(|c| Vector3::from(c.offset))
                        .collect();
                    children.iter().sum::<Vector3<f64>>() / children.len() as f64
                }
            };
            let com = if s.tip.is_some() && s.parent < 0 {
                Vector3::zeros()
            } else {
                extent / 2.0
            };
            JointSpec {
                name: s.name.to_string(),
                parent: (s.parent >= 0).then_some(s.parent as usize),
                offset: Vector3::from(s.offset),
                mass: s.mass,
                inertia: ellipsoid_inertia(s.mass, extent, s.radius),
                com,
            }
        })
        .collect();
    KinematicModel::new(joints).expect("humanoid is valid")
}

fn point_mass(name: &str, parent: Option<usize>, offset: [f64; 3]) -> JointSpec {
    JointSpec {
        name: name.into(),
        parent,
        offset: Vector3::from(offset),
        mass: 1.0,
        inertia: Matrix3::zeros(),
        com: Vector3::new(0.0, 0.0, -1.0),
    }
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();

    let model = humanoid();
    assert!((model.total_mass() - 70.0).abs() < 1e-9, "{}", model.total_mass());
    let header = "# Default 24-joint humanoid (SMPL topology), 70 kg.\n\
                  # Bodies are solid ellipsoids spanning joint to child.\n";
    let text = model.to_model_string().replacen('\n', &format!("\n{header}"), 1);
    std::fs::write(dir.join("default_humanoid.model"), text).unwrap();

    let pendulum = KinematicModel::new(vec![point_mass("bob", None, [0.0; 3])]).unwrap();
    std::fs::write(dir.join("pendulum1.model"), pendulum.to_model_string()).unwrap();
    let double = KinematicModel::new(vec![
        point_mass("upper", None, [0.0; 3]),
        point_mass("lower", Some(0), [0.0, 0.0, -1.0]),
    ])
    .unwrap();
    std::fs::write(dir.join("double_pendulum.model"), double.to_model_string()).unwrap();

    for seq in [
        synthetic::static_stand(&model, 100),
        synthetic::slow_wave(&model, 100),
        synthetic::fast_spin(&model, 100),
    ] {
        seq.save(dir.join(format!("{}.motion", seq.source_id))).unwrap();
    }
}
