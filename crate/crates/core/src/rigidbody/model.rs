use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};

pub const MODEL_HEADER: &str = "torquescore-model v1";

/// Standard gravity along -z.
pub const DEFAULT_GRAVITY: [f64; 3] = [0.0, 0.0, -9.81];

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// One body of the kinematic tree and the spherical joint attaching it to its
/// parent. Angles follow the intrinsic X-Y-Z convention.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub name: String,
    /// `None` for the root.
    pub parent: Option<usize>,
    /// Joint position in the parent frame (m).
    pub offset: Vector3<f64>,
    pub mass: f64,
    /// Inertia about the center of mass, joint frame (kg m^2).
    pub inertia: Matrix3<f64>,
    /// Center of mass in the joint frame (m).
    pub com: Vector3<f64>,
}

/// Validated, immutable joint tree. Generalized coordinates are the root
/// translation followed by three Euler angles per joint, so `dof = 3 + 3 * J`.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicModel {
    joints: Vec<JointSpec>,
    gravity: Vector3<f64>,
}

impl KinematicModel {
    pub fn new(joints: Vec<JointSpec>) -> Result<Self> {
        validate(&joints)?;
        Ok(Self {
            joints,
            gravity: Vector3::from(DEFAULT_GRAVITY),
        })
    }

    pub fn with_gravity(mut self, gravity: Vector3<f64>) -> Self {
        self.gravity = gravity;
        self
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn joint_count(&self) -> usize {
        self.joints.len()
    }

    pub fn dof(&self) -> usize {
        3 + 3 * self.joints.len()
    }

    pub fn gravity(&self) -> Vector3<f64> {
        self.gravity
    }

    pub fn total_mass(&self) -> f64 {
        self.joints.iter().map(|j| j.mass).sum()
    }

    /// Copy of the model with every mass and inertia multiplied by `factor`.
    pub fn scaled_inertia(&self, factor: f64) -> Result<Self> {
        let joints = self
            .joints
            .iter()
            .map(|j| JointSpec {
                mass: j.mass * factor,
                inertia: j.inertia * factor,
                ..j.clone()
            })
            .collect();
        Ok(Self::new(joints)?.with_gravity(self.gravity))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l).trim()))
            .filter(|(_, l)| !l.is_empty());

        match lines.next() {
            Some((_, MODEL_HEADER)) => {}
            Some((n, other)) => {
                return Err(Error::parse(
                    source_name,
                    n,
                    format!("expected header `{MODEL_HEADER}`, found `{other}`"),
                ))
            }
            None => return Err(Error::parse(source_name, 0, "empty model file")),
        }

        let mut joints = Vec::new();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 15 {
                return Err(Error::parse(
                    source_name,
                    n,
                    format!("expected 15 fields, found {}", fields.len()),
                ));
            }
            let parent: i64 = fields[1]
                .parse()
                .map_err(|_| Error::parse(source_name, n, "parent index is not an integer"))?;
            let mut v = [0.0f64; 13];
            for (slot, raw) in v.iter_mut().zip(&fields[2..]) {
                *slot = raw
                    .parse()
                    .map_err(|_| Error::parse(source_name, n, format!("`{raw}` is not a number")))?;
            }
            let parent = match parent {
                -1 => None,
                p if p >= 0 => Some(p as usize),
                p => return Err(Error::parse(source_name, n, format!("parent index {p} out of range"))),
            };
            let [ox, oy, oz, mass, cx, cy, cz, ixx, iyy, izz, ixy, ixz, iyz] = v;
            joints.push(JointSpec {
                name: fields[0].to_string(),
                parent,
                offset: Vector3::new(ox, oy, oz),
                mass,
                inertia: Matrix3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz),
                com: Vector3::new(cx, cy, cz),
            });
        }
        Self::new(joints)
    }

    /// Serializes to the text model format. Round-trips through [`Self::parse`].
    pub fn to_model_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MODEL_HEADER}").unwrap();
        writeln!(
            out,
            "# name parent off_x off_y off_z mass com_x com_y com_z Ixx Iyy Izz Ixy Ixz Iyz"
        )
        .unwrap();
        for j in &self.joints {
            let parent = j.parent.map_or(-1, |p| p as i64);
            let i = &j.inertia;
            writeln!(
                out,
                "{} {} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?} {:?}",
                j.name,
                parent,
                j.offset.x,
                j.offset.y,
                j.offset.z,
                j.mass,
                j.com.x,
                j.com.y,
                j.com.z,
                i[(0, 0)],
                i[(1, 1)],
                i[(2, 2)],
                i[(0, 1)],
                i[(0, 2)],
                i[(1, 2)],
            )
            .unwrap();
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

fn validate(joints: &[JointSpec]) -> Result<()> {
    if joints.is_empty() {
        return Err(Error::Validation("model has no joints".into()));
    }
    let mut names = std::collections::HashSet::new();
    for (idx, j) in joints.iter().enumerate() {
        if !names.insert(j.name.as_str()) {
            return Err(Error::Validation(format!("duplicate joint name `{}`", j.name)));
        }
        match (idx, j.parent) {
            (0, None) => {}
            (0, Some(_)) => {
                return Err(Error::Validation(format!(
                    "first joint `{}` must be the root (parent -1)",
                    j.name
                )))
            }
            (_, None) => {
                return Err(Error::Validation(format!(
                    "joint `{}` is a second root; exactly one root is allowed",
                    j.name
                )))
            }
            (_, Some(p)) if p >= idx => {
                return Err(Error::Validation(format!(
                    "joint `{}` (index {idx}) has parent {p}; parents must precede children \
                     (cyclic or unsorted tree)",
                    j.name
                )))
            }
            _ => {}
        }
        let finite = j
            .offset
            .iter()
            .chain(j.com.iter())
            .chain(j.inertia.iter())
            .all(|x| x.is_finite())
            && j.mass.is_finite();
        if !finite {
            return Err(Error::Validation(format!(
                "joint `{}` has non-finite parameters",
                j.name
            )));
        }
        if j.mass < 0.0 {
            return Err(Error::Validation(format!(
                "joint `{}` has negative mass {}",
                j.name, j.mass
            )));
        }
        let asym = (j.inertia - j.inertia.transpose()).abs().max();
        if asym > SYMMETRY_TOLERANCE {
            return Err(Error::Validation(format!(
                "joint `{}` has an asymmetric inertia tensor (max deviation {asym:e})",
                j.name
            )));
        }
        let scale = j.inertia.abs().max().max(1.0);
        let min_eig = SymmetricEigen::new(j.inertia).eigenvalues.min();
        if min_eig < -SYMMETRY_TOLERANCE * scale {
            return Err(Error::Validation(format!(
                "joint `{}` has an indefinite inertia tensor (eigenvalue {min_eig:e})",
                j.name
            )));
        }
    }
    Ok(())
}
