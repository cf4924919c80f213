//! Motion sequences: text I/O, derivative estimation, resampling and
//! fixed-length clip partitioning.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rigidbody::{GeneralizedState, KinematicModel};

pub const MOTION_HEADER: &str = "torquescore-motion v1";
pub const DEFAULT_CLIP_LEN: usize = 100;
/// Smallest clip that still splits into four segments of two frames.
pub const MIN_CLIP_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct MotionSequence {
    pub source_id: String,
    pub fps: f64,
    pub frames: Vec<DVector<f64>>,
    pub qdot: Option<Vec<DVector<f64>>>,
    pub qddot: Option<Vec<DVector<f64>>>,
}

impl MotionSequence {
    pub fn new(source_id: impl Into<String>, fps: f64, frames: Vec<DVector<f64>>) -> Result<Self> {
        let seq = Self {
            source_id: source_id.into(),
            fps,
            frames,
            qdot: None,
            qddot: None,
        };
        seq.validate()?;
        Ok(seq)
    }

    fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::InvalidConfig(format!("fps must be positive, got {}", self.fps)));
        }
        let Some(first) = self.frames.first() else {
            return Err(Error::TooShort { required: 1, actual: 0 });
        };
        let n = first.len();
        for f in &self.frames {
            if f.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: f.len(),
                    context: "frame",
                });
            }
        }
        for track in [&self.qdot, &self.qddot].into_iter().flatten() {
            if track.len() != self.frames.len() {
                return Err(Error::LengthMismatch {
                    left: self.frames.len(),
                    right: track.len(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dof(&self) -> usize {
        self.frames.first().map_or(0, |f| f.len())
    }

    pub fn has_derivatives(&self) -> bool {
        self.qdot.is_some() && self.qddot.is_some()
    }

    /// State of frame `i`, or `None` when derivatives have not been estimated.
    pub fn state(&self, i: usize) -> Option<GeneralizedState> {
        let qd = self.qdot.as_ref()?.get(i)?.clone();
        let qdd = self.qddot.as_ref()?.get(i)?.clone();
        Some(GeneralizedState {
            q: self.frames.get(i)?.clone(),
            qdot: qd,
            qddot: qdd,
        })
    }

    pub fn states(&self) -> Option<Vec<GeneralizedState>> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }

    /// Frames `start..start + len` as a new sequence, keeping derivatives.
    pub fn slice(&self, start: usize, len: usize) -> MotionSequence {
        let range = start..start + len;
        MotionSequence {
            source_id: self.source_id.clone(),
            fps: self.fps,
            frames: self.frames[range.clone()].to_vec(),
            qdot: self.qdot.as_ref().map(|v| v[range.clone()].to_vec()),
            qddot: self.qddot.as_ref().map(|v| v[range].to_vec()),
        }
    }

    pub fn load(path: impl AsRef<Path>, model: &KinematicModel) -> Result<Self> {
        let path = path.as_ref();
        let mut text = String::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Error::io(path, e))?;
        let source_id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let seq = Self::parse(&text, &source_id)?;
        if seq.dof() != model.dof() {
            return Err(Error::DimensionMismatch {
                expected: model.dof(),
                actual: seq.dof(),
                context: "motion frame length vs model dof",
            });
        }
        Ok(seq)
    }

    pub fn parse(text: &str, source_id: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_once('#').map_or(l, |(h, _)| h).trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(source_id, 0, format!("missing {what}")))
        };
        let (n, header) = next("header")?;
        if header != MOTION_HEADER {
            return Err(Error::parse(
                source_id,
                n,
                format!("expected header `{MOTION_HEADER}`, found `{header}`"),
            ));
        }
        let (n, fps_line) = next("fps line")?;
        let fps: f64 =
            keyed_value(fps_line, "fps").ok_or_else(|| Error::parse(source_id, n, "expected `fps <value>`"))?;
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::parse(source_id, n, "fps must be positive"));
        }
        let (n, dof_line) = next("dof line")?;
        let dof: usize =
            keyed_value(dof_line, "dof").ok_or_else(|| Error::parse(source_id, n, "expected `dof <N>`"))?;

        let mut frames = Vec::new();
        for (n, line) in lines {
            let values = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(source_id, n, format!("`{t}` is not a finite number")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != dof {
                return Err(Error::DimensionMismatch {
                    expected: dof,
                    actual: values.len(),
                    context: "motion frame length vs declared dof",
                });
            }
            frames.push(DVector::from_vec(values));
        }
        if frames.is_empty() {
            return Err(Error::parse(source_id, 0, "motion has no frames"));
        }
        Self::new(source_id, fps, frames)
    }

    pub fn to_motion_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MOTION_HEADER}").unwrap();
        writeln!(out, "fps {}", self.fps).unwrap();
        writeln!(out, "dof {}", self.dof()).unwrap();
        for f in &self.frames {
            let row: Vec<String> = f.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(self.to_motion_string().as_bytes()))
            .map_err(|e| Error::io(path, e))
    }
}

fn keyed_value<T: std::str::FromStr>(line: &str, key: &str) -> Option<T> {
    let mut it = line.split_whitespace();
    (it.next()? == key).then_some(())?;
    let v = it.next()?.parse().ok()?;
    it.next().is_none().then_some(v)
}

/// Removes 2*pi jumps so consecutive samples differ by at most pi.
pub fn unwrap_angles(track: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(track.len());
    let mut shift = 0.0;
    for (i, &x) in track.iter().enumerate() {
        if i > 0 {
            let delta = x + shift - out[i - 1];
            if delta.abs() > PI {
                shift -= TAU * (delta / TAU).round();
            }
        }
        out.push(x + shift);
    }
    out
}

/// Fills `qdot` and `qddot` by finite differences in generalized coordinates.
///
/// Euler-angle channels (index 3 onward) are unwrapped first. Interior frames
/// use central differences; the endpoints use one-sided second-order stencils
/// (the acceleration falls back to the three-point stencil when `t == 3`).
pub fn estimate_derivatives(seq: &MotionSequence) -> Result<MotionSequence> {
    let t = seq.len();
    if t < 3 {
        return Err(Error::TooShort { required: 3, actual: t });
    }
    let n = seq.dof();
    let fps = seq.fps;
    let fps2 = fps * fps;

    let mut unwrapped = seq.frames.clone();
    let mut track = vec![0.0; t];
    for k in 3..n {
        for (slot, f) in track.iter_mut().zip(&seq.frames) {
            *slot = f[k];
        }
        for (f, v) in unwrapped.iter_mut().zip(unwrap_angles(&track)) {
            f[k] = v;
        }
    }

    let q = &unwrapped;
    let mut qdot = vec![DVector::zeros(n); t];
    let mut qddot = vec![DVector::zeros(n); t];
    for i in 1..t - 1 {
        qdot[i] = (&q[i + 1] - &q[i - 1]) * (fps / 2.0);
        qddot[i] = ((&q[i + 1] + &q[i - 1]) - &q[i] * 2.0) * fps2;
    }
    // One-sided stencils written as differences from the endpoint so a
    // constant track gives exactly zero.
    let l = t - 1;
    let d = |i: usize, j: usize| &q[i] - &q[j];
    qdot[0] = (d(1, 0) * 4.0 - d(2, 0)) * (fps / 2.0);
    qdot[l] = (d(l, l - 1) * 4.0 - d(l, l - 2)) * (fps / 2.0);
    if t >= 4 {
        qddot[0] = (d(2, 0) * 4.0 - d(1, 0) * 5.0 - d(3, 0)) * fps2;
        qddot[l] = (d(l - 2, l) * 4.0 - d(l - 1, l) * 5.0 - d(l - 3, l)) * fps2;
    } else {
        qddot[0] = ((&q[2] + &q[0]) - &q[1] * 2.0) * fps2;
        qddot[l] = qddot[0].clone();
    }

    Ok(MotionSequence {
        source_id: seq.source_id.clone(),
        fps,
        frames: seq.frames.clone(),
        qdot: Some(qdot),
        qddot: Some(qddot),
    })
}

/// Keeps every `fps / target_fps`-th frame; derivative tracks are dropped.
pub fn resample(seq: &MotionSequence, target_fps: f64) -> Result<MotionSequence> {
    let ratio = seq.fps / target_fps;
    let stride = ratio.round();
    if target_fps.is_nan() || target_fps <= 0.0 || stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio {
        return Err(Error::NonIntegerStride {
            from: seq.fps,
            to: target_fps,
        });
    }
    let frames = seq.frames.iter().step_by(stride as usize).cloned().collect();
    MotionSequence::new(seq.source_id.clone(), target_fps, frames)
}

/// A fixed-length window of a source sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Clip {
    pub start_frame: usize,
    pub motion: MotionSequence,
}

impl Clip {
    pub fn source_id(&self) -> &str {
        &self.motion.source_id
    }

    pub fn id(&self) -> String {
        clip_id(&self.motion.source_id, self.start_frame)
    }

    pub fn len(&self) -> usize {
        self.motion.len()
    }

    pub fn is_empty(&self) -> bool {
        self.motion.is_empty()
    }
}

pub fn clip_id(source_id: &str, start_frame: usize) -> String {
    format!("{source_id}_f{start_frame:06}")
}

/// Splits `seq` into windows of `clip_len` frames starting every `stride`
/// frames. A trailing window shorter than `clip_len` is dropped, so a short
/// sequence yields no clips.
pub fn partition_clips(seq: &MotionSequence, clip_len: usize, stride: usize) -> Result<Vec<Clip>> {
    if clip_len < MIN_CLIP_LEN {
        return Err(Error::InvalidConfig(format!(
            "clip length {clip_len} is below the minimum of {MIN_CLIP_LEN}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidConfig("stride must be at least 1".into()));
    }
    let t = seq.len();
    Ok((0..)
        .map(|k| k * stride)
        .take_while(|start| start + clip_len <= t)
        .map(|start| Clip {
            start_frame: start,
            motion: seq.slice(start, clip_len),
        })
        .collect())
}

pub const MANIFEST_COLUMNS: [&str; 10] = [
    "clip_id",
    "source_id",
    "start_frame",
    "length",
    "fps",
    "d1",
    "d2",
    "d3",
    "mds",
    "status",
];

/// One manifest line. Sources that produced no clip (too short or unreadable)
/// get a row with an empty `clip_id` and a non-`ok` status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub clip_id: String,
    pub source_id: String,
    pub start_frame: Option<usize>,
    pub length: Option<usize>,
    pub fps: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
    pub mds: Option<f64>,
    #[serde(default = "ok_status")]
    pub status: String,
}

fn ok_status() -> String {
    "ok".into()
}

impl ManifestRow {
    pub fn for_clip(clip: &Clip) -> Self {
        Self {
            clip_id: clip.id(),
            source_id: clip.source_id().to_string(),
            start_frame: Some(clip.start_frame),
            length: Some(clip.len()),
            fps: Some(clip.motion.fps),
            d1: None,
            d2: None,
            d3: None,
            mds: None,
            status: ok_status(),
        }
    }

    pub fn flagged(source_id: &str, status: impl Into<String>) -> Self {
        Self {
            clip_id: String::new(),
            source_id: source_id.to_string(),
            start_frame: None,
            length: None,
            fps: None,
            d1: None,
            d2: None,
            d3: None,
            mds: None,
            status: status.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClipManifest {
    pub rows: Vec<ManifestRow>,
}

impl ClipManifest {
    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        w.write_record(MANIFEST_COLUMNS)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io("<manifest>", e))?;
        Ok(())
    }

    /// Reads a manifest; lines starting with `#` are skipped.
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let rows = r.deserialize().collect::<std::result::Result<Vec<ManifestRow>, _>>()?;
        let mut seen = std::collections::HashSet::new();
        for row in rows.iter().filter(|r| !r.clip_id.is_empty()) {
            if !seen.insert(row.clip_id.as_str()) {
                return Err(Error::InvalidConfig(format!("duplicate clip id `{}`", row.clip_id)));
            }
        }
        Ok(Self { rows })
    }
}
