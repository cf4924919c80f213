//! Finite-difference Jacobians of the torque map.

mod common;

use common::{fixture, model, random_state, rng};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use torquescore::motion::estimate_derivatives;
use torquescore::perturbation::{
    frame_jacobian, joint_torque_reduction, sequence_jacobians, torque_jacobian, PerturbationConfig, StackedJacobian,
};
use torquescore::rigidbody::{default_humanoid, inverse_dynamics, mass_matrix};
use torquescore::{GeneralizedState, MotionSequence};

const FPS: f64 = 30.0;

#[test]
fn qddot_block_reproduces_mass_matrix() {
    let m = default_humanoid();
    let cfg = PerturbationConfig::default();
    let mut r = rng(20);
    for _ in 0..5 {
        let s = random_state(&m, &mut r);
        let jac = torque_jacobian(&m, &s, FPS, &cfg).unwrap();
        let mm = mass_matrix(&m, &s.q).unwrap();
        let block = jac.columns(150, 75);
        let err = (block - &mm).abs().max();
        assert!(err <= 1e-5 * (1.0 + mm.norm()), "{err}");
    }
}

#[test]
fn pendulum_angle_sensitivity() {
    let m = model("pendulum1.model");
    let cfg = PerturbationConfig::default();
    let mut r = rng(21);
    for _ in 0..20 {
        let theta = r.gen_range(0.1..3.0);
        let mut q = DVector::zeros(6);
        q[3] = theta;
        let fj = frame_jacobian(&m, &GeneralizedState::stationary(q), 0, FPS, &cfg).unwrap();
        let expected = 9.81 * theta.cos();
        assert!(
            (fj.matrix[(0, 3)] - expected).abs() < 1e-5,
            "{} vs {expected}",
            fj.matrix[(0, 3)]
        );
    }
}

#[test]
fn richardson_ratio_is_four() {
    // Central differences converge as eps^2: successive halvings shrink the
    // change by a factor of four.
    let m = model("double_pendulum.model");
    let mut q = DVector::zeros(9);
    q[3] = 0.7;
    q[6] = -0.4;
    q[4] = 0.2;
    let qd = DVector::from_fn(9, |i, _| 0.3 + 0.1 * i as f64);
    let qdd = DVector::from_fn(9, |i, _| 0.5 - 0.07 * i as f64);
    let s = GeneralizedState::new(q, qd, qdd).unwrap();
    let jac = |eps: f64| {
        frame_jacobian(&m, &s, 0, 1.0, &PerturbationConfig::with_eps(eps))
            .unwrap()
            .matrix
    };
    let eps = 2e-2;
    let (a, b, c) = (jac(eps), jac(eps / 2.0), jac(eps / 4.0));
    let ratio = (&a - &b).norm() / (&b - &c).norm();
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn clip_stack_shape() {
    let m = default_humanoid();
    let seq = MotionSequence::load(fixture("slow_wave.motion"), &m).unwrap();
    let seq = estimate_derivatives(&seq).unwrap();
    let frames = sequence_jacobians(&m, &seq, &PerturbationConfig::default()).unwrap();
    let stack = StackedJacobian::from_frames(&frames).unwrap();
    assert_eq!(stack.matrix.shape(), (100, 5400));
    assert_eq!(stack.max_rank(), 100);
    assert_eq!(stack.degenerate_count(), 0);
    // Row-major flattening over (joint, direction).
    assert_eq!(stack.matrix[(17, 3 * 225 + 10)], frames[17].matrix[(3, 10)]);
}

#[test]
fn static_pose_without_gravity() {
    let m = default_humanoid().with_gravity(Vector3::zeros());
    let seq = estimate_derivatives(&torquescore::synthetic::static_stand(&m, 12)).unwrap();
    let cfg = PerturbationConfig::default();
    let frames = sequence_jacobians(&m, &seq, &cfg).unwrap();
    let [_, _, eps_a] = cfg.steps(FPS);
    let mm = mass_matrix(&m, &seq.frames[0]).unwrap();
    for f in &frames {
        assert!(f.matrix.columns(0, 150).iter().all(|&v| v == 0.0));
        for k in 0..75 {
            let plus = joint_torque_reduction((mm.column(k) * eps_a).as_slice(), &m, cfg.delta).unwrap();
            let minus = joint_torque_reduction((mm.column(k) * -eps_a).as_slice(), &m, cfg.delta).unwrap();
            let expected = (plus - minus) / (2.0 * eps_a);
            for j in 0..24 {
                assert!((f.matrix[(j, 150 + k)] - expected[j]).abs() < 1e-9);
            }
        }
    }
}

fn bits(m: &DMatrix<f64>) -> Vec<u64> {
    m.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn frames_are_independent_and_permutable() {
    let m = default_humanoid();
    let seq = estimate_derivatives(&MotionSequence::load(fixture("fast_spin.motion"), &m).unwrap()).unwrap();
    let clip = seq.slice(0, 12);
    let cfg = PerturbationConfig::default();
    let frames = sequence_jacobians(&m, &clip, &cfg).unwrap();

    let alone = frame_jacobian(&m, &clip.state(5).unwrap(), 5, FPS, &cfg).unwrap();
    assert_eq!(bits(&alone.matrix), bits(&frames[5].matrix));

    let perm: Vec<usize> = (0..12).rev().collect();
    let mut shuffled = clip.clone();
    for track in [
        &mut shuffled.frames,
        shuffled.qdot.as_mut().unwrap(),
        shuffled.qddot.as_mut().unwrap(),
    ] {
        *track = perm.iter().map(|&i| track[i].clone()).collect();
    }
    let permuted = sequence_jacobians(&m, &shuffled, &cfg).unwrap();
    for (row, &src) in perm.iter().enumerate() {
        assert_eq!(bits(&permuted[row].matrix), bits(&frames[src].matrix));
    }
}

#[test]
fn central_difference_quotient_is_sign_symmetric() {
    let m = default_humanoid();
    let s = random_state(&m, &mut rng(22));
    let cfg = PerturbationConfig::default();
    let eps = cfg.eps_q;
    let reduced = |q: DVector<f64>| {
        let st = GeneralizedState::new(q, s.qdot.clone(), s.qddot.clone()).unwrap();
        joint_torque_reduction(inverse_dynamics(&m, &st, None).unwrap().as_slice(), &m, cfg.delta).unwrap()
    };
    let mut qp = s.q.clone();
    let mut qm = s.q.clone();
    qp[7] += eps;
    qm[7] -= eps;
    let (fp, fm) = (reduced(qp), reduced(qm));
    let forward = (&fp - &fm) / (2.0 * eps);
    let swapped = (&fm - &fp) / (-2.0 * eps);
    assert_eq!(forward, swapped);
    let fj = frame_jacobian(&m, &s, 0, FPS, &cfg).unwrap();
    assert_eq!(fj.matrix.column(7).into_owned(), forward);
}

#[test]
fn reduced_jacobian_matches_chain_rule() {
    // d|tau_j| = (tau_j / |tau_j|) . d tau_j away from zero torque. Small
    // uniform steps keep the curvature of the norm out of the comparison.
    let m = default_humanoid();
    let cfg = PerturbationConfig {
        eps_q: 1e-6,
        eps_qdot: Some(1e-6),
        eps_qddot: Some(1e-6),
        ..Default::default()
    };
    let s = random_state(&m, &mut rng(23));
    let tau = inverse_dynamics(&m, &s, None).unwrap();
    let full = torque_jacobian(&m, &s, FPS, &cfg).unwrap();
    let reduced = frame_jacobian(&m, &s, 0, FPS, &cfg).unwrap().matrix;
    for j in 0..24 {
        let tj = tau.rows(3 + 3 * j, 3).into_owned();
        if tj.norm() < 1e-3 {
            continue;
        }
        let unit = &tj / tj.norm();
        let chain = unit.transpose() * full.rows(3 + 3 * j, 3);
        for k in 0..225 {
            let scale = 1.0 + full.column(k).norm();
            assert!((chain[k] - reduced[(j, k)]).abs() <= 1e-6 * scale, "j={j} k={k}");
        }
    }
}

#[test]
fn jacobian_scales_with_mass() {
    let m = default_humanoid();
    let heavy = m.scaled_inertia(2.0).unwrap();
    let cfg = PerturbationConfig::default();
    let s = random_state(&m, &mut rng(24));
    let a = frame_jacobian(&m, &s, 0, FPS, &cfg).unwrap().matrix;
    let b = frame_jacobian(&heavy, &s, 0, FPS, &cfg).unwrap().matrix;
    let err = (&b - &a * 2.0).abs().max();
    assert!(err <= 1e-9 * a.abs().max(), "{err}");
}

#[test]
fn missing_derivatives_are_rejected() {
    let m = default_humanoid();
    let seq = torquescore::synthetic::static_stand(&m, 10);
    assert!(sequence_jacobians(&m, &seq, &PerturbationConfig::default()).is_err());
}
