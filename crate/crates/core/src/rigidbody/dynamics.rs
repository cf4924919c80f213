//! Forward kinematics and inverse dynamics of the floating-base tree.
//!
//! Inverse dynamics is a recursive Newton-Euler pass in world-frame vectors:
//! Euler-angle rates are lifted to angular velocity and acceleration through
//! the rate map, and the transmitted joint moments are pulled back to
//! Euler-rate coordinates with its transpose. The mass matrix is assembled
//! separately from body Jacobians so the two routes can be checked against
//! each other.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::euler;
use super::model::KinematicModel;
use crate::error::{Error, Result};

pub type TorqueVector = DVector<f64>;
pub type MassMatrix = DMatrix<f64>;

/// Per-frame state `(q, q', q'')`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedState {
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
    pub qddot: DVector<f64>,
}

impl GeneralizedState {
    pub fn new(q: DVector<f64>, qdot: DVector<f64>, qddot: DVector<f64>) -> Result<Self> {
        let n = q.len();
        check_len(n, qdot.len(), "qdot")?;
        check_len(n, qddot.len(), "qddot")?;
        Ok(Self { q, qdot, qddot })
    }

    pub fn stationary(q: DVector<f64>) -> Self {
        let n = q.len();
        Self {
            q,
            qdot: DVector::zeros(n),
            qddot: DVector::zeros(n),
        }
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// `[q, q', q'']` concatenated.
    pub fn to_flat(&self) -> Vec<f64> {
        self.q
            .iter()
            .chain(self.qdot.iter())
            .chain(self.qddot.iter())
            .copied()
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|x| x.is_finite())
    }
}

/// World pose of every joint frame.
#[derive(Debug, Clone)]
pub struct JointPoses {
    pub positions: Vec<Vector3<f64>>,
    pub rotations: Vec<Matrix3<f64>>,
}

fn check_len(expected: usize, actual: usize, context: &'static str) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            expected,
            actual,
            context,
        });
    }
    Ok(())
}

#[inline]
fn angles(v: &[f64], joint: usize) -> Vector3<f64> {
    Vector3::new(v[3 + 3 * joint], v[4 + 3 * joint], v[5 + 3 * joint])
}

pub fn forward_kinematics(model: &KinematicModel, q: &[f64]) -> Result<JointPoses> {
    check_len(model.dof(), q.len(), "q")?;
    let nj = model.joint_count();
    let mut positions = Vec::with_capacity(nj);
    let mut rotations: Vec<Matrix3<f64>> = Vec::with_capacity(nj);
    for (i, joint) in model.joints().iter().enumerate() {
        let local = euler::rotation(&angles(q, i));
        match joint.parent {
            None => {
                positions.push(Vector3::new(q[0], q[1], q[2]));
                rotations.push(local);
            }
            Some(p) => {
                positions.push(positions[p] + rotations[p] * joint.offset);
                rotations.push(rotations[p] * local);
            }
        }
    }
    Ok(JointPoses { positions, rotations })
}

/// Scratch buffers for [`inverse_dynamics_into`], reusable across calls on one
/// model.
#[derive(Debug, Clone, Default)]
pub struct DynamicsWorkspace {
    rot: Vec<Matrix3<f64>>,
    omega: Vec<Vector3<f64>>,
    alpha: Vec<Vector3<f64>>,
    accel: Vec<Vector3<f64>>,
    offset: Vec<Vector3<f64>>,
    force: Vec<Vector3<f64>>,
    moment: Vec<Vector3<f64>>,
}

impl DynamicsWorkspace {
    fn reset(&mut self, nj: usize) {
        for buf in [
            &mut self.omega,
            &mut self.alpha,
            &mut self.accel,
            &mut self.offset,
            &mut self.force,
            &mut self.moment,
        ] {
            buf.clear();
            buf.resize(nj, Vector3::zeros());
        }
        self.rot.clear();
        self.rot.resize(nj, Matrix3::identity());
    }
}

/// Inverse dynamics on raw slices, writing `tau = M q'' + h - f_ext` into `out`.
///
/// Slices must have length `model.dof()`; this is not rechecked. With
/// `with_gravity == false` the gravity vector is ignored.
pub fn inverse_dynamics_into(
    model: &KinematicModel,
    q: &[f64],
    qdot: &[f64],
    qddot: &[f64],
    with_gravity: bool,
    ws: &mut DynamicsWorkspace,
    out: &mut [f64],
) -> Result<()> {
    let nj = model.joint_count();
    ws.reset(nj);
    let gravity = if with_gravity {
        model.gravity()
    } else {
        Vector3::zeros()
    };

    for (i, joint) in model.joints().iter().enumerate() {
        let th = angles(q, i);
        let sigma_min = euler::rate_map_min_singular(&th);
        if sigma_min < euler::SINGULAR_TOLERANCE {
            return Err(Error::SingularEulerMap { joint: i, sigma_min });
        }
        let thd = angles(qdot, i);
        let thdd = angles(qddot, i);
        let e = euler::rate_map(&th);
        let local = euler::rotation(&th);
        let w_rel_local = e * thd;
        let wdot_rel_local = e * thdd + euler::rate_map_dot_times(&th, &thd);

        match joint.parent {
            None => {
                let r = local;
                ws.rot[i] = r;
                ws.omega[i] = r * w_rel_local;
                ws.alpha[i] = r * wdot_rel_local;
                // Gravity enters as an upward acceleration of the base.
                ws.accel[i] = Vector3::new(qddot[0], qddot[1], qddot[2]) - gravity;
            }
            Some(p) => {
                let rp = ws.rot[p];
                let wp = ws.omega[p];
                let d = rp * joint.offset;
                let r = rp * local;
                let w_rel = r * w_rel_local;
                ws.offset[i] = d;
                ws.accel[i] = ws.accel[p] + ws.alpha[p].cross(&d) + wp.cross(&wp.cross(&d));
                ws.rot[i] = r;
                ws.omega[i] = wp + w_rel;
                ws.alpha[i] = ws.alpha[p] + wp.cross(&w_rel) + r * wdot_rel_local;
            }
        }

        let r = ws.rot[i];
        let w = ws.omega[i];
        let a = ws.alpha[i];
        let c = r * joint.com;
        let a_com = ws.accel[i] + a.cross(&c) + w.cross(&w.cross(&c));
        let f = a_com * joint.mass;
        let inertia = r * joint.inertia * r.transpose();
        ws.force[i] = f;
        ws.moment[i] = inertia * a + w.cross(&(inertia * w)) + c.cross(&f);
    }

    // Children have larger indices, so a reverse sweep sees each body's
    // subtree totals before passing them up.
    for i in (1..nj).rev() {
        let p = model.joints()[i].parent.expect("non-root joint has a parent");
        let f = ws.force[i];
        let n = ws.moment[i] + ws.offset[i].cross(&f);
        ws.force[p] += f;
        ws.moment[p] += n;
    }

    out[0] = ws.force[0].x;
    out[1] = ws.force[0].y;
    out[2] = ws.force[0].z;
    for i in 0..nj {
        let e = euler::rate_map(&angles(q, i));
        let tau = e.transpose() * (ws.rot[i].transpose() * ws.moment[i]);
        out[3 + 3 * i] = tau.x;
        out[4 + 3 * i] = tau.y;
        out[5 + 3 * i] = tau.z;
    }
    Ok(())
}

/// `tau = M(q) q'' + h(q, q') - f_ext`. `f_ext` defaults to zero.
pub fn inverse_dynamics(
    model: &KinematicModel,
    state: &GeneralizedState,
    f_ext: Option<&DVector<f64>>,
) -> Result<TorqueVector> {
    let n = model.dof();
    check_len(n, state.q.len(), "q")?;
    check_len(n, state.qdot.len(), "qdot")?;
    check_len(n, state.qddot.len(), "qddot")?;
    let mut out = DVector::zeros(n);
    inverse_dynamics_into(
        model,
        state.q.as_slice(),
        state.qdot.as_slice(),
        state.qddot.as_slice(),
        true,
        &mut DynamicsWorkspace::default(),
        out.as_mut_slice(),
    )?;
    if let Some(f) = f_ext {
        check_len(n, f.len(), "f_ext")?;
        out -= f;
    }
    Ok(out)
}

/// Gravity, Coriolis and centrifugal terms: inverse dynamics at zero
/// acceleration.
pub fn bias_term(model: &KinematicModel, q: &DVector<f64>, qdot: &DVector<f64>) -> Result<DVector<f64>> {
    let n = model.dof();
    check_len(n, q.len(), "q")?;
    check_len(n, qdot.len(), "qdot")?;
    let zeros = DVector::zeros(n);
    let mut out = DVector::zeros(n);
    inverse_dynamics_into(
        model,
        q.as_slice(),
        qdot.as_slice(),
        zeros.as_slice(),
        true,
        &mut DynamicsWorkspace::default(),
        out.as_mut_slice(),
    )?;
    Ok(out)
}

/// Generalized inertia `M(q) = sum_b m_b Jv_b^T Jv_b + Jw_b^T I_b Jw_b` built
/// from the body center-of-mass Jacobians.
pub fn mass_matrix(model: &KinematicModel, q: &DVector<f64>) -> Result<MassMatrix> {
    let n = model.dof();
    check_len(n, q.len(), "q")?;
    let q = q.as_slice();
    let nj = model.joint_count();
    let poses = forward_kinematics(model, q)?;

    // World axis of every Euler-rate coordinate: R_k * E_k[:, l].
    let mut axes = Vec::with_capacity(nj);
    for k in 0..nj {
        let th = angles(q, k);
        let sigma_min = euler::rate_map_min_singular(&th);
        if sigma_min < euler::SINGULAR_TOLERANCE {
            return Err(Error::SingularEulerMap { joint: k, sigma_min });
        }
        axes.push(poses.rotations[k] * euler::rate_map(&th));
    }

    let mut m = DMatrix::zeros(n, n);
    let mut jv = DMatrix::<f64>::zeros(3, n);
    let mut jw = DMatrix::<f64>::zeros(3, n);
    for (b, body) in model.joints().iter().enumerate() {
        jv.fill(0.0);
        jw.fill(0.0);
        let rot = poses.rotations[b];
        let com = poses.positions[b] + rot * body.com;
        jv.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        let mut k = Some(b);
        while let Some(j) = k {
            let lever = com - poses.positions[j];
            for l in 0..3 {
                let col = 3 + 3 * j + l;
                let u = axes[j].column(l).into_owned();
                jw.column_mut(col).copy_from(&u);
                jv.column_mut(col).copy_from(&u.cross(&lever));
            }
            k = model.joints()[j].parent;
        }
        let inertia = rot * body.inertia * rot.transpose();
        m += jv.transpose() * &jv * body.mass + jw.transpose() * (inertia * &jw);
    }
    // Restore exact symmetry lost to rounding in the products above.
    let mt = m.transpose();
    m = (m + mt) * 0.5;
    Ok(m)
}
