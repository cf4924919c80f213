//! Reading score tables written by `score`, in either output format.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};

use crate::failure::{CmdResult, Failure};

/// The columns of a score row the analytics need.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub clip_id: String,
    pub mds: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub d3: Option<f64>,
}

pub fn read_scores(path: &Path) -> CmdResult<Vec<ScoreEntry>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))
        .map_err(Failure::Usage)?;
    let entries = if path.extension().is_some_and(|e| e == "jsonl") {
        read_jsonl(&text)
    } else {
        read_csv(&text)
    };
    entries
        .with_context(|| format!("in score table `{}`", path.display()))
        .map_err(Failure::Usage)
}

fn read_csv(text: &str) -> anyhow::Result<Vec<ScoreEntry>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers: HashMap<String, usize> = r
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_string(), i))
        .collect();
    let id_col = *headers
        .get("clip_id")
        .ok_or_else(|| anyhow!("missing `clip_id` column"))?;
    let col = |name: &str| headers.get(name).copied();
    let (mds, d1, d2, d3) = (col("mds"), col("d1"), col("d2"), col("d3"));
    let mut out = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let num = |c: Option<usize>| -> anyhow::Result<Option<f64>> {
            match c.and_then(|c| record.get(c)).map(str::trim) {
                None | Some("") => Ok(None),
                Some(v) => v
                    .parse::<f64>()
                    .map(Some)
                    .with_context(|| format!("row {}: `{v}` is not a number", i + 1)),
            }
        };
        out.push(ScoreEntry {
            clip_id: record.get(id_col).unwrap_or_default().to_string(),
            mds: num(mds)?,
            d1: num(d1)?,
            d2: num(d2)?,
            d3: num(d3)?,
        });
    }
    Ok(out)
}

fn read_jsonl(text: &str) -> anyhow::Result<Vec<ScoreEntry>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        let Some(id) = v.get("clip_id").and_then(|x| x.as_str()) else {
            // Header records carry the configuration only.
            continue;
        };
        let num = |k: &str| v.get(k).and_then(|x| x.as_f64());
        out.push(ScoreEntry {
            clip_id: id.to_string(),
            mds: num("mds"),
            d1: num("d1"),
            d2: num("d2"),
            d3: num("d3"),
        });
    }
    Ok(out)
}

pub fn read_errors(path: &Path) -> CmdResult<Vec<(String, f64)>> {
    let file = fs::File::open(path)
        .with_context(|| format!("cannot read `{}`", path.display()))
        .map_err(Failure::Usage)?;
    torquescore::analysis::read_error_table(file)
        .with_context(|| format!("in error table `{}`", path.display()))
        .map_err(Failure::Usage)
}
