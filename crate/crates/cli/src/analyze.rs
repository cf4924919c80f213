use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use torquescore::analysis::{correlations, dsje, exclude_outliers, join_errors, mid};

use crate::config::{OutputArgs, RunConfig};
use crate::failure::{CmdResult, Failure};
use crate::tables::{read_errors, read_scores};

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Score table from `score` (CSV, or JSONL by extension).
    #[arg(long, value_name = "PATH")]
    pub scores: PathBuf,

    /// `clip_id,mpjpe_g` table in millimeters.
    #[arg(long, value_name = "PATH")]
    pub errors: PathBuf,

    /// Report the error-gap maximizing threshold.
    #[arg(long)]
    pub mid: bool,

    /// Smallest group size on either side of a candidate threshold.
    #[arg(long, default_value_t = 1)]
    pub min_partition: usize,

    /// Mean error below each of these MDS thresholds.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_name = "C1,C2,...")]
    pub dsje: Vec<f64>,

    /// Report Pearson, Spearman and Kendall tau-b.
    #[arg(long)]
    pub correlations: bool,

    /// Drop records whose error exceeds the first value while their MDS
    /// exceeds the second.
    #[arg(long, value_delimiter = ',', num_args = 1, value_name = "MAX_ERROR,MAX_MDS")]
    pub exclude_outliers: Option<Vec<f64>>,

    #[command(flatten)]
    pub output: OutputArgs,
}

fn entry<T: Serialize>(r: torquescore::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("result serializes"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn run(args: &AnalyzeArgs) -> CmdResult {
    let scores = read_scores(&args.scores)?;
    let errors = read_errors(&args.errors)?;
    let mut warnings = Vec::new();

    let scored: Vec<(String, f64)> = scores
        .iter()
        .filter_map(|s| match s.mds {
            Some(m) => Some((s.clip_id.clone(), m)),
            None => {
                warnings.push(format!("clip `{}` has no score", s.clip_id));
                None
            }
        })
        .collect();
    let joined = join_errors(&scored, &errors);
    if !joined.unmatched_scores.is_empty() {
        warnings.push(format!("scores without errors: {}", joined.unmatched_scores.join(", ")));
    }
    if !joined.unmatched_errors.is_empty() {
        warnings.push(format!("errors without scores: {}", joined.unmatched_errors.join(", ")));
    }
    if joined.records.is_empty() {
        for w in &warnings {
            log::warn!("{w}");
        }
        return Err(Failure::Empty("no joined records".into()));
    }

    let mut records = joined.records;
    if let Some(limits) = &args.exclude_outliers {
        let [max_error, max_mds] = limits[..] else {
            return Err(Failure::usage("--exclude-outliers takes MAX_ERROR,MAX_MDS"));
        };
        let before = records.len();
        records = exclude_outliers(&records, max_error, max_mds);
        if records.len() < before {
            warnings.push(format!("excluded {} outlier record(s)", before - records.len()));
        }
    }

    let everything = !args.mid && args.dsje.is_empty() && !args.correlations;
    let mut report = serde_json::Map::new();
    report.insert("records".into(), records.len().into());
    if args.mid || everything {
        report.insert("mid".into(), entry(mid(&records, args.min_partition)));
    }
    if !args.dsje.is_empty() {
        let map: BTreeMap<String, Value> = args
            .dsje
            .iter()
            .map(|&c| (c.to_string(), entry(dsje(&records, c))))
            .collect();
        report.insert("dsje".into(), serde_json::to_value(map)?);
    }
    if args.correlations || everything {
        report.insert("correlations".into(), entry(correlations(&records)));
    }
    report.insert("warnings".into(), warnings.into());
    report.insert("config".into(), RunConfig::new("analyze", None, 1, args).to_json());
    if !args.output.no_timestamp {
        report.insert("generated_unix".into(), crate::config::unix_now().into());
    }

    let mut out = args.output.writer()?;
    serde_json::to_writer_pretty(&mut out, &Value::Object(report))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
