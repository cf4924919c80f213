//! Difficulty thresholds: the split maximizing the error gap, and error
//! means over an easy stratum.

use serde::{Deserialize, Serialize};

use super::records::{pairs, ScoredRecord};
use crate::error::{Error, Result};
use crate::numeric::{exact_mean, ExactSum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidResult {
    pub threshold: f64,
    pub mu_low: f64,
    pub mu_high: f64,
    pub gap: f64,
    pub low_count: usize,
    pub high_count: usize,
}

/// Scans every observed score `c` (except the largest) as a split into
/// `mds <= c` and `mds > c` and returns the one with the largest
/// `mean(high) - mean(low)`. Ties go to the smallest threshold.
///
/// Group sums are exact, so the result equals a direct per-threshold scan.
pub fn mid(records: &[ScoredRecord], min_partition: usize) -> Result<MidResult> {
    let min_partition = min_partition.max(1);
    let mut data = pairs(records)?;
    if data.len() < 2 * min_partition {
        return Err(Error::TooFewRecords {
            required: 2 * min_partition,
            actual: data.len(),
        });
    }
    data.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = data.len();

    // Boundaries after the last element of each run of equal scores.
    let ends: Vec<usize> = (1..n).filter(|&i| data[i].0 != data[i - 1].0).collect();

    // suffix[i] = exact sum of errors in data[i..].
    let mut suffix = vec![0.0; n + 1];
    let mut acc = ExactSum::new();
    for i in (0..n).rev() {
        acc.add(data[i].1);
        suffix[i] = acc.value();
    }

    let mut best: Option<MidResult> = None;
    let mut low = ExactSum::new();
    let mut consumed = 0;
    for &end in &ends {
        for &(_, e) in &data[consumed..end] {
            low.add(e);
        }
        consumed = end;
        let (low_count, high_count) = (end, n - end);
        if low_count < min_partition || high_count < min_partition {
            continue;
        }
        let mu_low = low.value() / low_count as f64;
        let mu_high = suffix[end] / high_count as f64;
        let gap = mu_high - mu_low;
        if best.is_none_or(|b| gap > b.gap) {
            best = Some(MidResult {
                threshold: data[end - 1].0,
                mu_low,
                mu_high,
                gap,
                low_count,
                high_count,
            });
        }
    }
    best.ok_or(Error::TooFewRecords {
        required: 2 * min_partition,
        actual: n,
    })
}

/// Mean error over records with `mds < threshold` (strict).
pub fn dsje(records: &[ScoredRecord], threshold: f64) -> Result<f64> {
    let stratum: Vec<f64> = pairs(records)?
        .into_iter()
        .filter(|&(m, _)| m < threshold)
        .map(|(_, e)| e)
        .collect();
    if stratum.is_empty() {
        return Err(Error::EmptyStratum { threshold });
    }
    Ok(exact_mean(&stratum))
}
