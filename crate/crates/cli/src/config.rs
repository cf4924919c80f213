//! Options shared between commands and the configuration echo written into
//! every output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::Args;
use serde::Serialize;
use torquescore::motion::{DEFAULT_CLIP_LEN, MIN_CLIP_LEN, MOTION_HEADER};
use torquescore::rigidbody::{default_humanoid, MODEL_HEADER};
use torquescore::{DiversityWeights, KinematicModel, PerturbationConfig, PerturbationScope, ScoreConfig, SpectralMode};

use crate::failure::{CmdResult, Failure};

pub const MODEL_ENV: &str = "TORQUESCORE_MODEL";
pub const BUILTIN_MODEL: &str = "builtin:default_humanoid";

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Kinematic model file; the built-in 24-joint humanoid when unset.
    #[arg(long, env = MODEL_ENV, value_name = "PATH")]
    pub model: Option<PathBuf>,
}

impl ModelArgs {
    pub fn load(&self) -> CmdResult<LoadedModel> {
        match &self.model {
            None => Ok(LoadedModel {
                source: BUILTIN_MODEL.to_string(),
                model: default_humanoid(),
            }),
            Some(path) => {
                if !path.is_file() {
                    return Err(Failure::usage(format!("model file `{}` not found", path.display())));
                }
                let model = KinematicModel::load(path)
                    .with_context(|| format!("loading model `{}`", path.display()))
                    .map_err(Failure::Usage)?;
                Ok(LoadedModel {
                    source: path.display().to_string(),
                    model,
                })
            }
        }
    }
}

pub struct LoadedModel {
    pub source: String,
    pub model: KinematicModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Full,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spectral {
    Stacked,
    PerFrame,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoringArgs {
    /// Component weights `w1,w2,w3`.
    #[arg(long, default_value_t = DiversityWeights::default(), allow_hyphen_values = true)]
    #[serde(serialize_with = "as_string")]
    pub weights: DiversityWeights,

    /// Perturbation step for positions and angles.
    #[arg(long, default_value_t = 1e-4)]
    pub eps_q: f64,

    /// Velocity step; `eps_q * fps` when unset.
    #[arg(long)]
    pub eps_qdot: Option<f64>,

    /// Acceleration step; `eps_q * fps^2` when unset.
    #[arg(long)]
    pub eps_qddot: Option<f64>,

    /// Smoothing of the per-joint torque norm.
    #[arg(long, default_value_t = 1e-8)]
    pub delta: f64,

    /// Relative floor for singular values.
    #[arg(long, default_value_t = 1e-12)]
    pub singular_floor: f64,

    /// Number of temporal segments.
    #[arg(short = 'K', long = "segments", default_value_t = torquescore::difficulty::DEFAULT_SEGMENTS)]
    pub segments: usize,

    /// Which state coordinates are perturbed.
    #[arg(long, value_enum, default_value_t = Scope::Full)]
    pub scope: Scope,

    /// One SVD of the whole clip or one per frame.
    #[arg(long, value_enum, default_value_t = Spectral::Stacked)]
    pub spectral: Spectral,
}

fn as_string<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl ScoringArgs {
    pub fn score_config(&self) -> CmdResult<ScoreConfig> {
        let cfg = ScoreConfig {
            perturbation: PerturbationConfig {
                eps_q: self.eps_q,
                eps_qdot: self.eps_qdot,
                eps_qddot: self.eps_qddot,
                delta: self.delta,
                singular_floor: self.singular_floor,
                scope: match self.scope {
                    Scope::Full => PerturbationScope::FullState,
                    Scope::Rotation => PerturbationScope::RotationOnly,
                },
            },
            weights: self.weights,
            segments: self.segments,
            spectral_mode: match self.spectral {
                Spectral::Stacked => SpectralMode::Stacked,
                Spectral::PerFrame => SpectralMode::PerFrame,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClipArgs {
    /// Frames per clip.
    #[arg(long, default_value_t = DEFAULT_CLIP_LEN)]
    pub clip_len: usize,

    /// Frames between clip starts; the clip length when unset.
    #[arg(long)]
    pub stride: Option<usize>,

    /// Resample sources to this rate first (must divide the source rate).
    #[arg(long)]
    pub fps: Option<f64>,
}

impl ClipArgs {
    pub fn validate(&self) -> CmdResult {
        if self.clip_len < MIN_CLIP_LEN {
            return Err(Failure::usage(format!(
                "--clip-len {} is below the minimum of {MIN_CLIP_LEN}",
                self.clip_len
            )));
        }
        if self.stride == Some(0) {
            return Err(Failure::usage("--stride must be at least 1"));
        }
        if let Some(fps) = self.fps {
            if !(fps.is_finite() && fps > 0.0) {
                return Err(Failure::usage("--fps must be positive"));
            }
        }
        Ok(())
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or(self.clip_len)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Leave the generation time out of output headers.
    #[arg(long)]
    pub no_timestamp: bool,
}

impl OutputArgs {
    pub fn writer(&self) -> CmdResult<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(io::BufWriter::new(create_file(path)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        })
    }
}

pub fn create_file(path: &Path) -> CmdResult<fs::File> {
    fs::File::create(path)
        .with_context(|| format!("cannot create `{}`", path.display()))
        .map_err(Failure::Usage)
}

/// Everything needed to reproduce an output.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, A: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub motion_format: &'static str,
    pub model_format: &'static str,
    pub command: &'static str,
    pub model: Option<ModelEcho>,
    pub threads: usize,
    pub args: &'a A,
}

#[derive(Debug, Serialize)]
pub struct ModelEcho {
    pub source: String,
    pub joints: usize,
    pub dof: usize,
    pub total_mass: f64,
}

impl<'a, A: Serialize> RunConfig<'a, A> {
    pub fn new(command: &'static str, model: Option<&LoadedModel>, threads: usize, args: &'a A) -> Self {
        Self {
            tool: "torquescore",
            version: torquescore::VERSION,
            motion_format: MOTION_HEADER,
            model_format: MODEL_HEADER,
            command,
            model: model.map(|m| ModelEcho {
                source: m.source.clone(),
                joints: m.model.joint_count(),
                dof: m.model.dof(),
                total_mass: m.model.total_mass(),
            }),
            threads,
            args,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configuration serializes")
    }

    /// `# key value` lines for CSV outputs.
    pub fn comment_header(&self, timestamp: bool) -> String {
        let mut out = format!("# torquescore {}\n# config {}\n", torquescore::VERSION, self.to_json());
        if timestamp {
            out.push_str(&format!("# generated_unix {}\n", unix_now()));
        }
        out
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Expands directories to the `.motion` files they contain, sorted by name.
pub fn expand_inputs(inputs: &[PathBuf]) -> CmdResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("cannot list `{}`", input.display()))
                .map_err(Failure::Usage)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "motion"))
                .collect();
            found.sort();
            out.extend(found);
        } else if input.exists() {
            out.push(input.clone());
        } else {
            return Err(Failure::usage(format!("input `{}` not found", input.display())));
        }
    }
    Ok(out)
}

pub fn source_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
