use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use log::warn;
use rayon::prelude::*;
use serde::Serialize;
use torquescore::motion::{partition_clips, resample};
use torquescore::{ClipManifest, ManifestRow, MotionSequence};

use crate::config::{create_file, expand_inputs, source_id, ClipArgs, ModelArgs, RunConfig};
use crate::failure::{CmdResult, Failure};

#[derive(Debug, Args, Serialize)]
pub struct PartitionArgs {
    /// Motion files, or directories of `.motion` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,

    /// Directory for the clip files and the manifest.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Manifest path; `<out-dir>/manifest.csv` when unset.
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub clips: ClipArgs,

    /// Leave the generation time out of the manifest header.
    #[arg(long)]
    pub no_timestamp: bool,
}

pub fn run(args: &PartitionArgs, threads: usize) -> CmdResult {
    args.clips.validate()?;
    let loaded = args.model.load()?;
    let inputs = expand_inputs(&args.inputs)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create `{}`", args.out_dir.display()))
        .map_err(Failure::Usage)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start {threads} worker threads: {e}")))?;
    let per_source: Vec<Vec<ManifestRow>> = pool.install(|| {
        inputs
            .par_iter()
            .map(|path| {
                let src = source_id(path);
                match split_source(args, &loaded.model, path) {
                    Ok(rows) if rows.is_empty() => vec![ManifestRow::flagged(
                        &src,
                        format!("too_short: fewer than {} frames", args.clips.clip_len),
                    )],
                    Ok(rows) => rows,
                    Err(e) => {
                        warn!("`{}`: {e}", path.display());
                        vec![ManifestRow::flagged(&src, format!("failed: {e}"))]
                    }
                }
            })
            .collect()
    });

    let manifest = ClipManifest {
        rows: per_source.into_iter().flatten().collect(),
    };
    let path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out_dir.join("manifest.csv"));
    let mut out = std::io::BufWriter::new(create_file(&path)?);
    let echo = RunConfig::new("partition", Some(&loaded), pool.current_num_threads(), args);
    out.write_all(echo.comment_header(!args.no_timestamp).as_bytes())?;
    manifest.write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn split_source(
    args: &PartitionArgs,
    model: &torquescore::KinematicModel,
    path: &std::path::Path,
) -> torquescore::Result<Vec<ManifestRow>> {
    let mut seq = MotionSequence::load(path, model)?;
    seq.source_id = source_id(path);
    if let Some(fps) = args.clips.fps {
        seq = resample(&seq, fps)?;
    }
    let clips = partition_clips(&seq, args.clips.clip_len, args.clips.stride())?;
    clips
        .iter()
        .map(|clip| {
            clip.motion.save(args.out_dir.join(format!("{}.motion", clip.id())))?;
            Ok(ManifestRow::for_clip(clip))
        })
        .collect()
}
