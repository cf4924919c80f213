//! Grid search for diversity weights against observed tracking errors.

use serde::{Deserialize, Serialize};

use super::correlation::spearman;
use crate::difficulty::DiversityWeights;
use crate::error::{Error, Result};

pub const MIN_CALIBRATION_ROWS: usize = 10;
/// Best correlations below this are flagged.
pub const LOW_CONFIDENCE_RHO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub weights: DiversityWeights,
    pub spearman: f64,
    pub low_confidence: bool,
    pub evaluated: usize,
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse grid `{spec}`"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let values = if spec.contains(':') {
        let parts: Vec<f64> = spec.split(':').map(num).collect::<Option<_>>().ok_or_else(bad)?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        spec.split(',').map(num).collect::<Option<Vec<_>>>().ok_or_else(bad)?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// Exhaustive search over `grid^3` for the weights whose scores have the
/// highest Spearman correlation with `errors`. Ties prefer the smaller L1
/// norm, then the lexicographically smallest triple. Triples that are all
/// zero or give constant scores are skipped.
pub fn calibrate_weights(components: &[[f64; 3]], errors: &[f64], grid: &[f64]) -> Result<Calibration> {
    if components.len() != errors.len() {
        return Err(Error::LengthMismatch {
            left: components.len(),
            right: errors.len(),
        });
    }
    if components.len() < MIN_CALIBRATION_ROWS {
        return Err(Error::TooFewRecords {
            required: MIN_CALIBRATION_ROWS,
            actual: components.len(),
        });
    }
    if grid.is_empty() {
        return Err(Error::InvalidConfig("calibration grid is empty".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut best: Option<(DiversityWeights, f64)> = None;
    let mut evaluated = 0;
    let mut scores = vec![0.0; components.len()];
    for &w1 in &grid {
        for &w2 in &grid {
            for &w3 in &grid {
                let Ok(w) = DiversityWeights::new(w1, w2, w3) else {
                    continue;
                };
                for (s, d) in scores.iter_mut().zip(components) {
                    *s = w.apply(d[0], d[1], d[2]);
                }
                let Ok(rho) = spearman(&scores, errors) else {
                    continue;
                };
                evaluated += 1;
                let better = match best {
                    None => true,
                    Some((bw, brho)) => rho > brho || (rho == brho && w.l1_norm() < bw.l1_norm()),
                };
                if better {
                    best = Some((w, rho));
                }
            }
        }
    }
    let (weights, rho) =
        best.ok_or_else(|| Error::InvalidConfig("no grid point gives a defined correlation".into()))?;
    Ok(Calibration {
        weights,
        spearman: rho,
        low_confidence: rho < LOW_CONFIDENCE_RHO,
        evaluated,
    })
}
