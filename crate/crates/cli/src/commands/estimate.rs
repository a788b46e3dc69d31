//! `perclab estimate`: Monte Carlo estimate of one event probability.

use crate::commands::Output;
use crate::config::{parse_list, resolve_seed, ConfigFile};
use crate::event_args::{build_event, default_region};
use crate::output::{fmt_f64, CsvOutput};
use crate::record::RunRecord;
use clap::Args;
use perclab_core::estimators::estimate_event;
use perclab_core::runner::BlockRunner;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Event kind: siteopen|chor|circuit|inout|point|ball|fourarm.
    #[arg(long)]
    pub event: Option<String>,
    /// Geometry parameter m (see `--help` for the per-kind meaning).
    #[arg(long)]
    pub m: Option<i32>,
    /// Geometry parameter n.
    #[arg(long)]
    pub n: Option<i32>,
    /// Site occupation probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed (default: config, then $PERCLAB_SEED, then 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated angles in radians (ball direction).
    #[arg(long)]
    pub angles: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved estimate specification; echoed into the run record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolved {
    pub event: String,
    pub m: i32,
    pub n: i32,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub angle: f64,
    pub out: PathBuf,
}

pub fn resolve(args: &EstimateArgs, config: &ConfigFile) -> anyhow::Result<Resolved> {
    let event = args
        .event
        .clone()
        .or_else(|| config.string("estimate", "event"))
        .ok_or_else(|| anyhow::anyhow!("--event is required (or [estimate] event in config)"))?;
    let angles = match &args.angles {
        Some(text) => parse_list::<f64>(text)?,
        None => config.f64_list("estimate", "angles").unwrap_or_default(),
    };
    Ok(Resolved {
        event,
        m: args.m.or_else(|| config.i32("estimate", "m")).unwrap_or(0),
        n: args.n.or_else(|| config.i32("estimate", "n")).unwrap_or(0),
        p: args
            .p
            .or_else(|| config.f64("estimate", "p"))
            .ok_or_else(|| anyhow::anyhow!("--p is required"))?,
        samples: args
            .samples
            .or_else(|| config.u64("estimate", "samples"))
            .unwrap_or(100_000),
        seed: resolve_seed(args.seed, config)?,
        angle: angles.first().copied().unwrap_or(0.0),
        out: args
            .out
            .clone()
            .or_else(|| config.string("estimate", "out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("perclab-estimate.csv")),
    })
}

pub fn execute(resolved: &Resolved, runner: &dyn BlockRunner) -> anyhow::Result<Vec<Output>> {
    let event = build_event(&resolved.event, resolved.m, resolved.n, resolved.angle)?;
    if !(0.0..=1.0).contains(&resolved.p) {
        return Err(perclab_core::Error::InvalidParameter(format!(
            "p = {} not in [0,1]",
            resolved.p
        ))
        .into());
    }
    let region = default_region(&event, resolved.p);
    let estimate = estimate_event(
        &event,
        region,
        resolved.p,
        resolved.samples,
        resolved.seed,
        runner,
    )?;
    let record = RunRecord::new("estimate", serde_json::to_value(resolved)?, resolved.seed);
    let mut csv = CsvOutput::new(
        record,
        &[
            "schema", "event", "geometry", "p", "samples", "p_hat", "ci_low", "ci_high", "seed",
        ],
    );
    csv.push_row(vec![
        "estimate-v1".into(),
        resolved.event.clone(),
        event.name(),
        fmt_f64(resolved.p),
        resolved.samples.to_string(),
        fmt_f64(estimate.p_hat),
        fmt_f64(estimate.ci_low),
        fmt_f64(estimate.ci_high),
        resolved.seed.to_string(),
    ]);
    Ok(vec![Output {
        path: resolved.out.clone(),
        content: csv.render()?,
    }])
}

pub fn run(
    args: &EstimateArgs,
    config: &ConfigFile,
    runner: &dyn BlockRunner,
) -> anyhow::Result<i32> {
    let resolved = resolve(args, config)?;
    let outputs = execute(&resolved, runner)?;
    for out in &outputs {
        out.write()?;
        println!("wrote {}", out.path.display());
    }
    Ok(0)
}
