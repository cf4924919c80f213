use std::collections::{HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A clip's difficulty paired with the tracking error a policy achieved on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub clip_id: String,
    pub mds: f64,
    /// MPJPE-G in millimeters, once an evaluation table is joined.
    pub error: Option<f64>,
}

impl ScoredRecord {
    pub fn new(clip_id: impl Into<String>, mds: f64, error: f64) -> Self {
        Self {
            clip_id: clip_id.into(),
            mds,
            error: Some(error),
        }
    }
}

/// `(mds, error)` pairs of the records that carry an error, rejecting
/// non-finite values.
pub(crate) fn pairs(records: &[ScoredRecord]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        if let Some(e) = r.error {
            if !(r.mds.is_finite() && e.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "record `{}` has a non-finite value",
                    r.clip_id
                )));
            }
            out.push((r.mds, e));
        }
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct ErrorRow {
    clip_id: String,
    mpjpe_g: f64,
}

/// Reads a `clip_id,mpjpe_g` table. Other columns and `#` lines are ignored.
pub fn read_error_table<R: Read>(reader: R) -> Result<Vec<(String, f64)>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let rows = r
        .deserialize::<ErrorRow>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut seen = HashSet::new();
    for row in &rows {
        if !seen.insert(row.clip_id.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "duplicate clip id `{}` in error table",
                row.clip_id
            )));
        }
    }
    Ok(rows.into_iter().map(|r| (r.clip_id, r.mpjpe_g)).collect())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JoinResult {
    pub records: Vec<ScoredRecord>,
    /// Ids present only in the score table.
    pub unmatched_scores: Vec<String>,
    /// Ids present only in the error table.
    pub unmatched_errors: Vec<String>,
}

/// Inner join of scores and errors on clip id, in score-table order.
pub fn join_errors(scores: &[(String, f64)], errors: &[(String, f64)]) -> JoinResult {
    let by_id: HashMap<&str, f64> = errors.iter().map(|(id, e)| (id.as_str(), *e)).collect();
    let score_ids: HashSet<&str> = scores.iter().map(|(id, _)| id.as_str()).collect();
    let mut out = JoinResult::default();
    for (id, mds) in scores {
        match by_id.get(id.as_str()) {
            Some(&e) => out.records.push(ScoredRecord::new(id.clone(), *mds, e)),
            None => out.unmatched_scores.push(id.clone()),
        }
    }
    out.unmatched_errors = errors
        .iter()
        .filter(|(id, _)| !score_ids.contains(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();
    out
}

/// Drops near-failure clips where the error exceeds `max_error` and the
/// score exceeds `max_mds` at the same time.
pub fn exclude_outliers(records: &[ScoredRecord], max_error: f64, max_mds: f64) -> Vec<ScoredRecord> {
    records
        .iter()
        .filter(|r| !(r.error.is_some_and(|e| e > max_error) && r.mds > max_mds))
        .cloned()
        .collect()
}
