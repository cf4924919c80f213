use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use torquescore::analysis::{calibrate_weights, parse_grid};

use crate::config::{OutputArgs, RunConfig};
use crate::failure::{CmdResult, Failure};
use crate::tables::{read_errors, read_scores};

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    /// Score table carrying `d1`, `d2` and `d3` columns.
    #[arg(long, value_name = "PATH")]
    pub components: PathBuf,

    /// `clip_id,mpjpe_g` table in millimeters.
    #[arg(long, value_name = "PATH")]
    pub errors: PathBuf,

    /// Candidate values for each weight: `start:stop:step` or `a,b,c`.
    #[arg(long, default_value = "-2:2:0.5", allow_hyphen_values = true)]
    pub grid: String,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn run(args: &CalibrateArgs) -> CmdResult {
    let grid = parse_grid(&args.grid)?;
    let scores = read_scores(&args.components)?;
    let errors: HashMap<String, f64> = read_errors(&args.errors)?.into_iter().collect();

    let mut components = Vec::new();
    let mut matched = Vec::new();
    let mut skipped = 0;
    for s in &scores {
        match (s.d1, s.d2, s.d3, errors.get(&s.clip_id)) {
            (Some(d1), Some(d2), Some(d3), Some(&e)) => {
                components.push([d1, d2, d3]);
                matched.push(e);
            }
            _ => skipped += 1,
        }
    }
    if components.is_empty() {
        return Err(Failure::Empty("no joined records".into()));
    }
    let cal = calibrate_weights(&components, &matched, &grid)?;
    let mut report = json!({
        "weights": cal.weights,
        "weights_arg": cal.weights.to_string(),
        "spearman": cal.spearman,
        "low_confidence": cal.low_confidence,
        "evaluated": cal.evaluated,
        "records": components.len(),
        "skipped": skipped,
        "grid": grid,
        "config": RunConfig::new("calibrate", None, 1, args).to_json(),
    });
    if !args.output.no_timestamp {
        report["generated_unix"] = crate::config::unix_now().into();
    }
    if cal.low_confidence {
        log::warn!(
            "best Spearman correlation {:.3} is weak; weights are low-confidence",
            cal.spearman
        );
    }
    let mut out = args.output.writer()?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
