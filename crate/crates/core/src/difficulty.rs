//! Spectral, variance and segment diversity, and their weighted sum.

use std::ops::Range;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::exact_sum;
use crate::perturbation::{FrameJacobian, StackedJacobian};

pub const DEFAULT_SEGMENTS: usize = 4;
/// Per-joint variances are clamped here before the log.
pub const VARIANCE_FLOOR: f64 = 1e-20;
/// Stand-in for `sigma_max` when the whole stack is zero.
pub const ABSOLUTE_SINGULAR_FLOOR: f64 = 1e-300;
/// Clips with more than this share of degenerate frames are not scored.
pub const MAX_DEGENERATE_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversityWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for DiversityWeights {
    /// Each component pushes the score in its difficulty direction: more
    /// spectral volume is harder, more joint variance is easier, more even
    /// segment volume is harder.
    fn default() -> Self {
        Self {
            w1: 1.0,
            w2: -1.0,
            w3: 1.0,
        }
    }
}

impl DiversityWeights {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        let w = Self { w1, w2, w3 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.as_array();
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidConfig(format!("weights must be finite: {v:?}")));
        }
        if v.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidConfig("weights must not all be zero".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }

    pub fn l1_norm(&self) -> f64 {
        self.as_array().iter().map(|x| x.abs()).sum()
    }

    pub fn apply(&self, d1: f64, d2: f64, d3: f64) -> f64 {
        self.w1 * d1 + self.w2 * d2 + self.w3 * d3
    }
}

impl std::str::FromStr for DiversityWeights {
    type Err = Error;

    /// Parses `w1,w2,w3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidConfig(format!("cannot parse weights `{s}`")))?;
        match parts[..] {
            [a, b, c] => Self::new(a, b, c),
            _ => Err(Error::InvalidConfig(format!("expected three weights, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for DiversityWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.w1, self.w2, self.w3)
    }
}

/// How the log-volume is taken over the clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMode {
    /// One SVD of the `t x (J * D)` stack.
    #[default]
    Stacked,
    /// Sum over frames of the log singular values of each `J x D` frame
    /// Jacobian (log square root of the Gram determinant per frame).
    PerFrame,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralSummary {
    pub value: f64,
    /// Number of singular values summed, `min(rows, cols)`.
    pub rank: usize,
    /// How many of them were raised to the floor.
    pub clamped: usize,
    /// The matrix was identically zero.
    pub zero: bool,
}

/// Sum of log singular values of `matrix` with values below
/// `floor_ratio * sigma_max` clamped to that floor.
pub fn spectral_summary(matrix: &DMatrix<f64>, floor_ratio: f64) -> Result<SpectralSummary> {
    if matrix.is_empty() {
        return Err(Error::EmptyStack);
    }
    let rank = matrix.nrows().min(matrix.ncols());
    let sigma = singular_values(matrix);
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        log::warn!("spectral diversity of an all-zero matrix");
        return Ok(SpectralSummary {
            value: rank as f64 * ABSOLUTE_SINGULAR_FLOOR.ln(),
            rank,
            clamped: rank,
            zero: true,
        });
    }
    let floor = floor_ratio * sigma_max;
    let mut clamped = 0;
    let value = sigma
        .iter()
        .map(|&s| {
            if s < floor {
                clamped += 1;
                floor.ln()
            } else {
                s.ln()
            }
        })
        .sum();
    Ok(SpectralSummary {
        value,
        rank,
        clamped,
        zero: false,
    })
}

pub fn spectral_diversity(stack: &StackedJacobian, floor_ratio: f64) -> Result<f64> {
    Ok(spectral_summary(&stack.matrix, floor_ratio)?.value)
}

/// Singular values, computed on the orientation with fewer columns.
fn singular_values(matrix: &DMatrix<f64>) -> Vec<f64> {
    let sv = if matrix.nrows() < matrix.ncols() {
        matrix.transpose().singular_values()
    } else {
        matrix.clone().singular_values()
    };
    sv.iter().copied().collect()
}

fn per_frame_spectral(frames: &[FrameJacobian], floor_ratio: f64) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::EmptyStack);
    }
    let mut total = 0.0;
    for f in frames {
        total += spectral_summary(&f.matrix, floor_ratio)?.value;
    }
    Ok(total)
}

fn spectral_of_frames(frames: &[FrameJacobian], floor_ratio: f64, mode: SpectralMode) -> Result<f64> {
    match mode {
        SpectralMode::Stacked => spectral_diversity(&StackedJacobian::from_frames(frames)?, floor_ratio),
        SpectralMode::PerFrame => per_frame_spectral(frames, floor_ratio),
    }
}

/// `sum_j log Var_j`, where `Var_j` pools joint `j`'s entries over every
/// non-degenerate frame and every perturbation direction.
///
/// Sums are exact before rounding, so the result does not depend on frame or
/// column order.
pub fn variance_diversity(frames: &[FrameJacobian]) -> Result<f64> {
    let live: Vec<&FrameJacobian> = frames.iter().filter(|f| !f.degenerate).collect();
    let Some(first) = live.first() else {
        return Err(Error::AllDegenerate);
    };
    let joints = first.matrix.nrows();
    let mut total = 0.0;
    let mut floored = 0;
    for j in 0..joints {
        let values: Vec<f64> = live
            .iter()
            .flat_map(|f| f.matrix.row(j).iter().copied().collect::<Vec<_>>())
            .collect();
        let count = values.len() as f64;
        let mean = exact_sum(values.iter().copied()) / count;
        let var = exact_sum(values.iter().map(|x| (x - mean) * (x - mean))) / count;
        if var < VARIANCE_FLOOR {
            floored += 1;
        }
        total += var.max(VARIANCE_FLOOR).ln();
    }
    if floored > 0 {
        log::warn!("{floored} of {joints} joints have variance below the floor");
    }
    Ok(total)
}

/// `K` contiguous ranges covering `0..t`; the first `t % K` get one extra
/// frame.
pub fn segment_ranges(t: usize, segments: usize) -> Vec<Range<usize>> {
    let base = t / segments;
    let extra = t % segments;
    let mut start = 0;
    (0..segments)
        .map(|k| {
            let len = base + usize::from(k < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Mean spectral diversity over `segments` contiguous pieces of the clip.
pub fn segment_diversity(
    frames: &[FrameJacobian],
    segments: usize,
    floor_ratio: f64,
    mode: SpectralMode,
) -> Result<f64> {
    if segments == 0 {
        return Err(Error::InvalidConfig("segment count must be at least 1".into()));
    }
    if frames.len() < 2 * segments {
        return Err(Error::TooShort {
            required: 2 * segments,
            actual: frames.len(),
        });
    }
    let mut total = 0.0;
    for r in segment_ranges(frames.len(), segments) {
        total += spectral_of_frames(&frames[r], floor_ratio, mode)?;
    }
    Ok(total / segments as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyBreakdown {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub mds: f64,
    pub degenerate_fraction: f64,
    pub segments: usize,
    /// Singular values of the full stack raised to the floor.
    pub clamped_singular_values: usize,
}

/// Scores one clip from its frame Jacobians.
pub fn compute_mds(
    frames: &[FrameJacobian],
    weights: &DiversityWeights,
    segments: usize,
    floor_ratio: f64,
    mode: SpectralMode,
) -> Result<DifficultyBreakdown> {
    weights.validate()?;
    if frames.is_empty() {
        return Err(Error::EmptyStack);
    }
    let degenerate = frames.iter().filter(|f| f.degenerate).count();
    let degenerate_fraction = degenerate as f64 / frames.len() as f64;
    if degenerate_fraction > MAX_DEGENERATE_FRACTION {
        return Err(Error::Unscorable {
            degenerate,
            total: frames.len(),
        });
    }

    let (d1, clamped) = match mode {
        SpectralMode::Stacked => {
            let s = spectral_summary(&StackedJacobian::from_frames(frames)?.matrix, floor_ratio)?;
            (s.value, s.clamped)
        }
        SpectralMode::PerFrame => (per_frame_spectral(frames, floor_ratio)?, 0),
    };
    let d2 = variance_diversity(frames)?;
    let d3 = segment_diversity(frames, segments, floor_ratio, mode)?;
    Ok(DifficultyBreakdown {
        d1,
        d2,
        d3,
        mds: weights.apply(d1, d2, d3),
        degenerate_fraction,
        segments,
        clamped_singular_values: clamped,
    })
}
