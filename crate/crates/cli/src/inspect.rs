use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use torquescore::motion::estimate_derivatives;
use torquescore::perturbation::{frame_jacobian, joint_torque_reduction};
use torquescore::rigidbody::inverse_dynamics;
use torquescore::MotionSequence;

use crate::config::{ModelArgs, OutputArgs, RunConfig, ScoringArgs};
use crate::failure::{CmdResult, Failure};

#[derive(Debug, Args, Serialize)]
pub struct InspectArgs {
    /// Motion file to inspect.
    pub input: PathBuf,

    /// Only this frame; every frame when unset.
    #[arg(long)]
    pub frame: Option<usize>,

    /// Dump frame Jacobians instead of joint torques.
    #[arg(long)]
    pub jacobian: bool,

    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub scoring: ScoringArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// Per-joint torques or per-frame Jacobians as CSV, for debugging.
pub fn run(args: &InspectArgs) -> CmdResult {
    let loaded = args.model.load()?;
    let model = &loaded.model;
    let cfg = args.scoring.score_config()?;
    let seq = MotionSequence::load(&args.input, model)?;
    let seq = estimate_derivatives(&seq)?;
    let frames: Vec<usize> = match args.frame {
        Some(f) if f >= seq.len() => {
            return Err(Failure::usage(format!(
                "frame {f} is out of range (sequence has {})",
                seq.len()
            )))
        }
        Some(f) => vec![f],
        None => (0..seq.len()).collect(),
    };

    let mut out = args.output.writer()?;
    let echo = RunConfig::new("inspect", Some(&loaded), 1, args);
    out.write_all(echo.comment_header(!args.output.no_timestamp).as_bytes())?;
    let mut w = csv::Writer::from_writer(&mut out);
    if args.jacobian {
        let d = cfg.perturbation.directions(model);
        let mut header = vec!["frame".to_string(), "joint".to_string(), "degenerate".to_string()];
        header.extend((0..d).map(|k| format!("d{k}")));
        w.write_record(&header)?;
        for &i in &frames {
            let state = seq.state(i).expect("derivatives were estimated");
            let fj = frame_jacobian(model, &state, i, seq.fps, &cfg.perturbation)?;
            for (j, spec) in model.joints().iter().enumerate() {
                let mut rec = vec![i.to_string(), spec.name.clone(), fj.degenerate.to_string()];
                rec.extend(fj.matrix.row(j).iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
    } else {
        w.write_record(["frame", "joint", "tau_x", "tau_y", "tau_z", "reduced"])?;
        for &i in &frames {
            let state = seq.state(i).expect("derivatives were estimated");
            let tau = inverse_dynamics(model, &state, None)?;
            let reduced = joint_torque_reduction(tau.as_slice(), model, cfg.perturbation.delta)?;
            for (j, spec) in model.joints().iter().enumerate() {
                let t = &tau.as_slice()[3 + 3 * j..6 + 3 * j];
                w.write_record([
                    i.to_string(),
                    spec.name.clone(),
                    t[0].to_string(),
                    t[1].to_string(),
                    t[2].to_string(),
                    reduced[j].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}
