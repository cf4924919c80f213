//! Finite-difference sensitivity of per-joint torque magnitudes to the
//! per-frame state.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::MotionSequence;
use crate::rigidbody::{inverse_dynamics_into, DynamicsWorkspace, GeneralizedState, KinematicModel};

/// Which state coordinates are perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationScope {
    /// All of `q`, `q'` and `q''`: `D = 3N` directions.
    #[default]
    FullState,
    /// Only the joint Euler angles of `q`: `D = 3J` directions.
    RotationOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    /// Step for positions and angles (m, rad).
    pub eps_q: f64,
    /// Step for velocities; `eps_q * fps` when unset.
    pub eps_qdot: Option<f64>,
    /// Step for accelerations; `eps_q * fps^2` when unset.
    pub eps_qddot: Option<f64>,
    /// Smoothing of the per-joint torque norm (N m).
    pub delta: f64,
    /// Singular values below `singular_floor * sigma_max` are clamped.
    pub singular_floor: f64,
    pub scope: PerturbationScope,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            eps_q: 1e-4,
            eps_qdot: None,
            eps_qddot: None,
            delta: 1e-8,
            singular_floor: 1e-12,
            scope: PerturbationScope::FullState,
        }
    }
}

impl PerturbationConfig {
    pub fn with_eps(eps_q: f64) -> Self {
        Self {
            eps_q,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let all = [
            self.eps_q,
            self.eps_qdot.unwrap_or(1.0),
            self.eps_qddot.unwrap_or(1.0),
            self.delta,
            self.singular_floor,
        ];
        if all.into_iter().all(positive) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "perturbation steps, delta and floor must be positive: {self:?}"
            )))
        }
    }

    /// Step sizes for the `q`, `q'` and `q''` blocks at a given frame rate.
    pub fn steps(&self, fps: f64) -> [f64; 3] {
        [
            self.eps_q,
            self.eps_qdot.unwrap_or(self.eps_q * fps),
            self.eps_qddot.unwrap_or(self.eps_q * fps * fps),
        ]
    }

    pub fn directions(&self, model: &KinematicModel) -> usize {
        match self.scope {
            PerturbationScope::FullState => 3 * model.dof(),
            PerturbationScope::RotationOnly => 3 * model.joint_count(),
        }
    }
}

/// Smoothed per-joint torque magnitude `sqrt(|tau_j|^2 + delta^2) - delta`.
///
/// Joint `j` owns the three Euler-rate entries `3 + 3j .. 6 + 3j`; the root's
/// translational residual force is not an actuator torque and is skipped.
pub fn joint_torque_reduction(tau: &[f64], model: &KinematicModel, delta: f64) -> Result<DVector<f64>> {
    if tau.len() != model.dof() {
        return Err(Error::DimensionMismatch {
            expected: model.dof(),
            actual: tau.len(),
            context: "torque vector",
        });
    }
    let mut out = DVector::zeros(model.joint_count());
    reduce_into(tau, delta, out.as_mut_slice());
    Ok(out)
}

#[inline]
fn reduce_into(tau: &[f64], delta: f64, out: &mut [f64]) {
    for (j, slot) in out.iter_mut().enumerate() {
        let t = &tau[3 + 3 * j..6 + 3 * j];
        let sq = t[0] * t[0] + t[1] * t[1] + t[2] * t[2];
        *slot = (sq + delta * delta).sqrt() - delta;
    }
}

/// Sensitivity of the reduced torques of one frame; `J x D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameJacobian {
    pub frame: usize,
    pub matrix: DMatrix<f64>,
    /// Set when the state sits at (or a perturbation crosses) a gimbal lock;
    /// the matrix is then all zeros.
    pub degenerate: bool,
}

/// Maps state-vector index (within `[q, q', q'']`) for each perturbation
/// direction.
fn direction_indices(model: &KinematicModel, scope: PerturbationScope) -> Vec<usize> {
    match scope {
        PerturbationScope::FullState => (0..3 * model.dof()).collect(),
        PerturbationScope::RotationOnly => (3..model.dof()).collect(),
    }
}

/// Central differences of `map(state)` over every perturbation direction.
/// `map` receives the perturbed `[q, q', q'']` and writes `rows` outputs.
fn central_differences<F>(
    model: &KinematicModel,
    state: &GeneralizedState,
    fps: f64,
    cfg: &PerturbationConfig,
    rows: usize,
    mut map: F,
) -> Result<DMatrix<f64>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n = model.dof();
    let steps = cfg.steps(fps);
    let dirs = direction_indices(model, cfg.scope);
    let mut x = state.to_flat();
    let mut plus = vec![0.0; rows];
    let mut minus = vec![0.0; rows];
    let mut jac = DMatrix::zeros(rows, dirs.len());
    for (col, &idx) in dirs.iter().enumerate() {
        let eps = steps[idx / n];
        let orig = x[idx];
        x[idx] = orig + eps;
        map(&x, &mut plus)?;
        x[idx] = orig - eps;
        map(&x, &mut minus)?;
        x[idx] = orig;
        let scale = 1.0 / (2.0 * eps);
        for r in 0..rows {
            jac[(r, col)] = (plus[r] - minus[r]) * scale;
        }
    }
    Ok(jac)
}

fn check_state(model: &KinematicModel, state: &GeneralizedState) -> Result<()> {
    for (len, context) in [
        (state.q.len(), "q"),
        (state.qdot.len(), "qdot"),
        (state.qddot.len(), "qddot"),
    ] {
        if len != model.dof() {
            return Err(Error::DimensionMismatch {
                expected: model.dof(),
                actual: len,
                context,
            });
        }
    }
    Ok(())
}

/// Finite-difference Jacobian of the full torque vector, `N x D`, before the
/// per-joint reduction. Its `q''` block approximates the mass matrix.
pub fn torque_jacobian(
    model: &KinematicModel,
    state: &GeneralizedState,
    fps: f64,
    cfg: &PerturbationConfig,
) -> Result<DMatrix<f64>> {
    check_state(model, state)?;
    let n = model.dof();
    let mut ws = DynamicsWorkspace::default();
    central_differences(model, state, fps, cfg, n, |x, out| {
        inverse_dynamics_into(model, &x[..n], &x[n..2 * n], &x[2 * n..], true, &mut ws, out)
    })
}

/// Jacobian of the reduced torque map at one frame. Gimbal lock is reported
/// through the `degenerate` flag instead of an error.
pub fn frame_jacobian(
    model: &KinematicModel,
    state: &GeneralizedState,
    frame: usize,
    fps: f64,
    cfg: &PerturbationConfig,
) -> Result<FrameJacobian> {
    check_state(model, state)?;
    let n = model.dof();
    let nj = model.joint_count();
    let mut ws = DynamicsWorkspace::default();
    let mut tau = vec![0.0; n];
    let result = if state.is_finite() {
        central_differences(model, state, fps, cfg, nj, |x, out| {
            inverse_dynamics_into(model, &x[..n], &x[n..2 * n], &x[2 * n..], true, &mut ws, &mut tau)?;
            reduce_into(&tau, cfg.delta, out);
            Ok(())
        })
    } else {
        Err(Error::SingularEulerMap {
            joint: 0,
            sigma_min: f64::NAN,
        })
    };
    match result {
        Ok(matrix) => Ok(FrameJacobian {
            frame,
            matrix,
            degenerate: false,
        }),
        Err(Error::SingularEulerMap { .. }) => Ok(FrameJacobian {
            frame,
            matrix: DMatrix::zeros(nj, cfg.directions(model)),
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Frame Jacobians of a whole clip, evaluated in parallel and returned in
/// frame order. The clip must carry derivative tracks.
pub fn sequence_jacobians(
    model: &KinematicModel,
    clip: &MotionSequence,
    cfg: &PerturbationConfig,
) -> Result<Vec<FrameJacobian>> {
    cfg.validate()?;
    if clip.is_empty() {
        return Err(Error::TooShort { required: 1, actual: 0 });
    }
    let states = clip
        .states()
        .ok_or_else(|| Error::InvalidConfig(format!("clip `{}` has no derivative tracks", clip.source_id)))?;
    states
        .par_iter()
        .enumerate()
        .map(|(i, s)| frame_jacobian(model, s, i, clip.fps, cfg))
        .collect()
}

/// Frame Jacobians flattened row-major over `(joint, direction)` and stacked
/// one row per frame: `t x (J * D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedJacobian {
    pub matrix: DMatrix<f64>,
    pub degenerate: Vec<bool>,
    pub joints: usize,
    pub directions: usize,
}

impl StackedJacobian {
    pub fn from_frames(frames: &[FrameJacobian]) -> Result<Self> {
        let first = frames.first().ok_or(Error::EmptyStack)?;
        let (joints, directions) = first.matrix.shape();
        let width = joints * directions;
        let mut matrix = DMatrix::zeros(frames.len(), width);
        for (row, f) in frames.iter().enumerate() {
            if f.matrix.shape() != (joints, directions) {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    actual: f.matrix.len(),
                    context: "frame Jacobian shape",
                });
            }
            for j in 0..joints {
                for k in 0..directions {
                    matrix[(row, j * directions + k)] = f.matrix[(j, k)];
                }
            }
        }
        Ok(Self {
            matrix,
            degenerate: frames.iter().map(|f| f.degenerate).collect(),
            joints,
            directions,
        })
    }

    pub fn frames(&self) -> usize {
        self.matrix.nrows()
    }

    /// Maximal rank `min(t, J * D)`.
    pub fn max_rank(&self) -> usize {
        self.matrix.nrows().min(self.matrix.ncols())
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// CSV dump: a `# rows cols` header line, then one row per line.
    pub fn to_csv_string(&self) -> String {
        let mut out = format!("# {} {}\n", self.matrix.nrows(), self.matrix.ncols());
        for r in 0..self.matrix.nrows() {
            let row: Vec<String> = self.matrix.row(r).iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
