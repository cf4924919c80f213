use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, ValueEnum};
use log::warn;
use rayon::prelude::*;
use serde::Serialize;
use torquescore::motion::{partition_clips, resample};
use torquescore::{clip_jacobians, score_clip, score_frames, MotionSequence, ScoreRow, StackedJacobian};

use crate::config::{expand_inputs, source_id, ClipArgs, ModelArgs, OutputArgs, RunConfig, ScoringArgs};
use crate::failure::{CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// Motion files, or directories of `.motion` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub scoring: ScoringArgs,

    #[command(flatten)]
    pub clips: ClipArgs,

    /// Score each input as a single clip.
    #[arg(long)]
    pub no_partition: bool,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Also write each clip's stacked Jacobian to `DIR/<clip_id>.jacobian.csv`.
    #[arg(long, value_name = "DIR")]
    pub dump_jacobian: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

struct Job {
    id: String,
    motion: MotionSequence,
}

pub fn run(args: &ScoreArgs, threads: usize) -> CmdResult {
    let loaded = args.model.load()?;
    let model = &loaded.model;
    let cfg = args.scoring.score_config()?;
    let stride = args.clips.stride();
    if !args.no_partition {
        args.clips.validate()?;
    }

    let mut jobs = Vec::new();
    let mut failed_sources = 0;
    for path in expand_inputs(&args.inputs)? {
        let loaded = MotionSequence::load(&path, model).and_then(|seq| match args.clips.fps {
            Some(fps) => resample(&seq, fps),
            None => Ok(seq),
        });
        let seq = match loaded {
            Ok(seq) => seq,
            Err(e) => {
                warn!("skipping `{}`: {e}", path.display());
                failed_sources += 1;
                continue;
            }
        };
        if args.no_partition {
            jobs.push(Job {
                id: source_id(&path),
                motion: seq,
            });
        } else {
            let clips = partition_clips(&seq, args.clips.clip_len, stride)?;
            if clips.is_empty() {
                warn!(
                    "`{}` has {} frames, fewer than the clip length {}",
                    path.display(),
                    seq.len(),
                    args.clips.clip_len
                );
            }
            jobs.extend(clips.into_iter().map(|c| Job {
                id: c.id(),
                motion: c.motion,
            }));
        }
    }
    if jobs.is_empty() {
        return Err(Failure::Empty(if failed_sources > 0 {
            format!("no clips to score ({failed_sources} input(s) could not be read)")
        } else {
            "no clips to score".to_string()
        }));
    }
    if let Some(dir) = &args.dump_jacobian {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create `{}`", dir.display()))
            .map_err(Failure::Usage)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start {threads} worker threads: {e}")))?;
    let results: Vec<(ScoreRow, Option<torquescore::Error>)> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let outcome = match &args.dump_jacobian {
                    None => score_clip(model, &job.motion, &cfg),
                    Some(dir) => clip_jacobians(model, &job.motion, &cfg).and_then(|frames| {
                        let stack = StackedJacobian::from_frames(&frames)?;
                        let path = dir.join(format!("{}.jacobian.csv", job.id));
                        fs::write(&path, stack.to_csv_string()).map_err(|e| torquescore::Error::Io {
                            path: path.clone(),
                            source: e,
                        })?;
                        score_frames(&frames, &cfg)
                    }),
                };
                let row = ScoreRow::new(job.id.clone(), &job.motion, model, &cfg, &outcome);
                (row, outcome.err())
            })
            .collect()
    });

    let echo = RunConfig::new("score", Some(&loaded), pool.current_num_threads(), args);
    let mut out = args.output.writer()?;
    match args.format {
        Format::Csv => {
            out.write_all(echo.comment_header(!args.output.no_timestamp).as_bytes())?;
            let mut w = csv::Writer::from_writer(&mut out);
            for (row, _) in &results {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut header = serde_json::json!({ "config": echo.to_json() });
            if !args.output.no_timestamp {
                header["generated_unix"] = crate::config::unix_now().into();
            }
            writeln!(out, "{header}")?;
            for (row, _) in &results {
                writeln!(out, "{}", serde_json::to_string(row)?)?;
            }
        }
    }
    out.flush()?;

    let failures: Vec<&torquescore::Error> = results.iter().filter_map(|(_, e)| e.as_ref()).collect();
    for (row, e) in &results {
        if let Some(e) = e {
            warn!("clip {}: {e}", row.clip_id);
        }
    }
    if failures.len() == results.len() {
        let first = failures[0];
        let msg = format!("all {} clip(s) failed; first error: {first}", results.len());
        return Err(if crate::failure::is_numerical(first) {
            Failure::Numerical(anyhow::anyhow!(msg))
        } else {
            Failure::usage(msg)
        });
    }
    Ok(())
}
