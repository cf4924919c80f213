//! Inverse dynamics against independent closed-form and Lagrangian oracles.

mod common;

use approx::assert_relative_eq;
use common::oracles::{lagrangian_oracle, G};
use common::{model, random_state, rng};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use torquescore::rigidbody::{
    bias_term, default_humanoid, forward_kinematics, inverse_dynamics, mass_matrix, GeneralizedState, KinematicModel,
};

fn pendulum_state(theta: f64) -> GeneralizedState {
    let mut q = DVector::zeros(6);
    q[3] = theta;
    GeneralizedState::stationary(q)
}

#[test]
fn fixture_counts() {
    let h = model("default_humanoid.model");
    assert_eq!((h.joint_count(), h.dof()), (24, 75));
    assert!((h.total_mass() - 70.0).abs() < 1e-9);
    let p = model("pendulum1.model");
    assert_eq!((p.joint_count(), p.dof()), (1, 6));
    assert_eq!(default_humanoid(), h);
}

#[test]
fn static_pendulum_torque_is_mgl_sin() {
    let m = model("pendulum1.model");
    let mut r = rng(1);
    for _ in 0..50 {
        let theta = r.gen_range(-3.0..3.0);
        let tau = inverse_dynamics(&m, &pendulum_state(theta), None).unwrap();
        let expected = 1.0 * G * 1.0 * f64::sin(theta);
        assert!(
            (tau[3] - expected).abs() <= 1e-8 * expected.abs().max(1e-12),
            "{theta}: {} vs {expected}",
            tau[3]
        );
        // The support force carries the weight.
        assert_relative_eq!(tau[2], G, epsilon = 1e-12);
        let h = bias_term(&m, &pendulum_state(theta).q, &DVector::zeros(6)).unwrap();
        assert_relative_eq!(h[3], expected, epsilon = 1e-12);
    }
}

#[test]
fn pendulum_mass_matrix_entry() {
    let m = model("pendulum1.model");
    for theta in [-1.0, 0.0, 0.4, 2.5] {
        let mm = mass_matrix(&m, &pendulum_state(theta).q).unwrap();
        assert_relative_eq!(mm[(3, 3)], 1.0, epsilon = 1e-12);
    }
}

#[test]
fn zero_gravity_static_pose_needs_no_torque() {
    let m = default_humanoid().with_gravity(Vector3::zeros());
    let mut r = rng(2);
    for _ in 0..10 {
        let s = GeneralizedState::stationary(random_state(&m, &mut r).q);
        let tau = inverse_dynamics(&m, &s, None).unwrap();
        assert!(tau.iter().all(|&x| x.abs() < 1e-12), "{tau}");
        let h = bias_term(&m, &s.q, &s.qdot).unwrap();
        assert!(h.iter().all(|&x| x.abs() < 1e-12));
    }
}

#[test]
fn double_pendulum_matches_numeric_lagrangian() {
    let m = model("double_pendulum.model");
    let mut r = rng(3);
    let idx = [0, 1, 2, 3, 6];
    for _ in 0..50 {
        let mut g = [0.0; 5];
        let mut gd = [0.0; 5];
        let mut gdd = [0.0; 5];
        // Support moves in the y-z plane only, so the motion stays planar.
        for k in 1..5 {
            g[k] = r.gen_range(-2.0..2.0);
            gd[k] = r.gen_range(-2.0..2.0);
            gdd[k] = r.gen_range(-3.0..3.0);
        }
        let embed = |v: &[f64; 5]| {
            let mut x = DVector::zeros(9);
            for (k, &i) in idx.iter().enumerate() {
                x[i] = v[k];
            }
            x
        };
        let s = GeneralizedState::new(embed(&g), embed(&gd), embed(&gdd)).unwrap();
        let tau = inverse_dynamics(&m, &s, None).unwrap();
        let oracle = DVector::from_row_slice(&lagrangian_oracle(g, gd, gdd));
        let ours = DVector::from_iterator(5, idx.iter().map(|&i| tau[i]));
        let err = (&ours - &oracle).norm();
        assert!(err <= 1e-6 * oracle.norm().max(1.0), "{ours} vs {oracle}");
        // Planar motion produces no out-of-plane joint torque.
        for i in [4, 5, 7, 8] {
            assert!(tau[i].abs() < 1e-9, "{}", tau[i]);
        }
    }
}

/// Lagrange's equations with `T = qd' M(q) qd / 2` built from [`mass_matrix`]
/// and the potential from forward kinematics:
/// `h = dM/dt qd - grad_q(T) + grad_q(V)`.
fn bias_from_mass_matrix(model: &KinematicModel, q: &DVector<f64>, qd: &DVector<f64>) -> DVector<f64> {
    let n = q.len();
    let h = 1e-5;
    let mdot = (mass_matrix(model, &(q + qd * h)).unwrap() - mass_matrix(model, &(q - qd * h)).unwrap()) / (2.0 * h);
    let energy = |q: &DVector<f64>| {
        let kinetic = 0.5 * qd.dot(&(mass_matrix(model, q).unwrap() * qd));
        let poses = forward_kinematics(model, q.as_slice()).unwrap();
        let potential: f64 = model
            .joints()
            .iter()
            .enumerate()
            .map(|(i, j)| -j.mass * model.gravity().dot(&(poses.positions[i] + poses.rotations[i] * j.com)))
            .sum();
        (kinetic, potential)
    };
    let mut grad = DVector::zeros(n);
    for k in 0..n {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[k] += h;
        qm[k] -= h;
        let (tp, vp) = energy(&qp);
        let (tm, vm) = energy(&qm);
        grad[k] = (-(tp - tm) + (vp - vm)) / (2.0 * h);
    }
    mdot * qd + grad
}

#[test]
fn humanoid_bias_matches_lagrangian_of_mass_matrix() {
    let m = default_humanoid();
    let mut r = rng(4);
    for _ in 0..3 {
        let s = random_state(&m, &mut r);
        let ours = bias_term(&m, &s.q, &s.qdot).unwrap();
        let oracle = bias_from_mass_matrix(&m, &s.q, &s.qdot);
        let err = (&ours - &oracle).norm();
        assert!(err <= 1e-6 * (1.0 + oracle.norm()), "err {err}, |h| {}", oracle.norm());
    }
}

#[test]
fn equation_of_motion_identity_on_humanoid() {
    let m = default_humanoid();
    let mut r = rng(5);
    for _ in 0..100 {
        let s = random_state(&m, &mut r);
        let tau = inverse_dynamics(&m, &s, None).unwrap();
        let mm = mass_matrix(&m, &s.q).unwrap();
        let h = bias_term(&m, &s.q, &s.qdot).unwrap();
        let err = (&tau - (&mm * &s.qddot + &h)).norm();
        assert!(err <= 1e-9 * (1.0 + tau.norm()), "{err}");
    }
}

#[test]
fn external_force_is_subtracted() {
    let m = default_humanoid();
    let s = random_state(&m, &mut rng(6));
    let f = DVector::from_fn(75, |i, _| i as f64 * 0.1);
    let a = inverse_dynamics(&m, &s, None).unwrap();
    let b = inverse_dynamics(&m, &s, Some(&f)).unwrap();
    assert_relative_eq!(a - f, b, epsilon = 1e-12);
}

#[test]
fn mass_matrix_symmetric_positive_definite() {
    for name in ["default_humanoid.model", "double_pendulum.model"] {
        let m = model(name);
        let mut r = rng(7);
        for _ in 0..20 {
            let q = random_state(&m, &mut r).q;
            let mm = mass_matrix(&m, &q).unwrap();
            assert!((&mm - mm.transpose()).norm() <= 1e-9 * mm.norm());
            if name == "default_humanoid.model" {
                let eig = mm.clone().symmetric_eigenvalues();
                assert!(eig.min() > 0.0, "{}", eig.min());
            }
        }
    }
}

#[test]
fn root_translation_block_is_total_mass() {
    let m = default_humanoid();
    let q = random_state(&m, &mut rng(8)).q;
    let mm = mass_matrix(&m, &q).unwrap();
    let block = mm.view((0, 0), (3, 3)).into_owned();
    assert_relative_eq!(block, DMatrix::identity(3, 3) * 70.0, epsilon = 1e-10);
}

#[test]
fn pendulum_power_balance_along_trajectory() {
    // theta(t) = A sin(w t) about x; power tau * qdot equals dE/dt.
    let m = model("pendulum1.model");
    let (amp, w) = (1.2, 1.7);
    let energy = |t: f64| {
        let th = amp * (w * t).sin();
        let thd = amp * w * (w * t).cos();
        0.5 * thd * thd - G * th.cos()
    };
    for i in 0..40 {
        let t = 0.1 * i as f64;
        let mut s = pendulum_state(amp * (w * t).sin());
        s.qdot[3] = amp * w * (w * t).cos();
        s.qddot[3] = -amp * w * w * (w * t).sin();
        let tau = inverse_dynamics(&m, &s, None).unwrap();
        let power = tau.dot(&s.qdot);
        let h = 1e-4;
        let de_dt = (energy(t + h) - energy(t - h)) / (2.0 * h);
        assert!(
            (power - de_dt).abs() <= 1e-6 * de_dt.abs().max(1.0),
            "{power} vs {de_dt}"
        );
    }
}

#[test]
fn humanoid_power_balance() {
    // Along q(t) = q0 + v t + a t^2 / 2, tau . qdot = d/dt (T + V).
    let m = default_humanoid();
    let s0 = random_state(&m, &mut rng(9));
    let at = |t: f64| {
        let q = &s0.q + &s0.qdot * t + &s0.qddot * (0.5 * t * t);
        let qd = &s0.qdot + &s0.qddot * t;
        (q, qd)
    };
    let energy = |t: f64| {
        let (q, qd) = at(t);
        let kinetic = 0.5 * qd.dot(&(mass_matrix(&m, &q).unwrap() * &qd));
        let poses = forward_kinematics(&m, q.as_slice()).unwrap();
        let potential: f64 = m
            .joints()
            .iter()
            .enumerate()
            .map(|(i, j)| -j.mass * m.gravity().dot(&(poses.positions[i] + poses.rotations[i] * j.com)))
            .sum();
        kinetic + potential
    };
    for t in [0.0, 0.05, 0.1] {
        let (q, qd) = at(t);
        let s = GeneralizedState::new(q, qd.clone(), s0.qddot.clone()).unwrap();
        let power = inverse_dynamics(&m, &s, None).unwrap().dot(&qd);
        let h = 1e-5;
        let de_dt = (energy(t + h) - energy(t - h)) / (2.0 * h);
        assert!(
            (power - de_dt).abs() <= 1e-6 * (1.0 + de_dt.abs()),
            "{power} vs {de_dt}"
        );
    }
}

#[test]
fn root_translation_does_not_change_torques() {
    let m = default_humanoid();
    let s = random_state(&m, &mut rng(10));
    let mut shifted = s.clone();
    shifted.q[0] += 12.5;
    shifted.q[1] -= 3.0;
    shifted.q[2] += 0.75;
    let a = inverse_dynamics(&m, &s, None).unwrap();
    let b = inverse_dynamics(&m, &shifted, None).unwrap();
    assert_eq!(a.as_slice(), b.as_slice());
}

#[test]
fn deterministic_outputs() {
    let m = default_humanoid();
    let s = random_state(&m, &mut rng(11));
    let a = inverse_dynamics(&m, &s, None).unwrap();
    let b = inverse_dynamics(&m, &s, None).unwrap();
    assert_eq!(
        a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn forward_kinematics_examples() {
    let m = default_humanoid();
    let zero = vec![0.0; 75];
    let rest = forward_kinematics(&m, &zero).unwrap();
    for (i, j) in m.joints().iter().enumerate() {
        let mut expected = Vector3::zeros();
        let mut k = Some(i);
        while let Some(c) = k {
            if m.joints()[c].parent.is_some() {
                expected += m.joints()[c].offset;
            }
            k = m.joints()[c].parent;
        }
        assert_relative_eq!(rest.positions[i], expected, epsilon = 1e-15);
        let _ = j;
    }
    let mut moved = zero.clone();
    moved[..3].copy_from_slice(&[1.0, 2.0, 3.0]);
    let shifted = forward_kinematics(&m, &moved).unwrap();
    for (a, b) in rest.positions.iter().zip(&shifted.positions) {
        assert_relative_eq!(b - a, Vector3::new(1.0, 2.0, 3.0), epsilon = 1e-15);
    }

    // Unit pendulum link turned pi/2 about x: tip (0, 0, -1) -> (0, 1, 0).
    let dp = model("double_pendulum.model");
    let mut q = vec![0.0; 9];
    q[3] = std::f64::consts::FRAC_PI_2;
    let poses = forward_kinematics(&dp, &q).unwrap();
    assert_relative_eq!(poses.positions[1], Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
}

#[test]
fn dimension_and_gimbal_errors() {
    use torquescore::Error;
    let m = default_humanoid();
    assert!(matches!(
        forward_kinematics(&m, &[0.0; 74]),
        Err(Error::DimensionMismatch { .. })
    ));
    let bad = GeneralizedState::stationary(DVector::zeros(74));
    assert!(matches!(
        inverse_dynamics(&m, &bad, None),
        Err(Error::DimensionMismatch { .. })
    ));
    let mut q = DVector::zeros(75);
    q[4] = std::f64::consts::FRAC_PI_2;
    let s = GeneralizedState::stationary(q.clone());
    assert!(matches!(
        inverse_dynamics(&m, &s, None),
        Err(Error::SingularEulerMap { joint: 0, .. })
    ));
    assert!(matches!(mass_matrix(&m, &q), Err(Error::SingularEulerMap { .. })));
}
