//! `perclab tau`: directional correlation lengths via two-point decay fits.

use crate::commands::Output;
use crate::config::{parse_list, resolve_seed, ConfigFile};
use crate::output::{fmt_f64, CsvOutput};
use crate::record::RunRecord;
use clap::Args;
use perclab_core::estimators::{default_tau_radii, isotropy_report};
use perclab_core::runner::BlockRunner;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Site occupation probability (must be sub-critical, p < 1/2).
    #[arg(long)]
    pub p: Option<f64>,
    /// Comma-separated direction angles in radians.
    #[arg(long)]
    pub angles: Option<String>,
    /// Comma-separated fit radii (default: auto window for this p).
    #[arg(long)]
    pub radii: Option<String>,
    /// Samples per (angle, radius) point.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolved {
    pub p: f64,
    pub angles: Vec<f64>,
    pub radii: Vec<i32>,
    pub samples: u64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn resolve(args: &TauArgs, config: &ConfigFile) -> anyhow::Result<Resolved> {
    let p = args
        .p
        .or_else(|| config.f64("tau", "p"))
        .ok_or_else(|| anyhow::anyhow!("--p is required"))?;
    let angles = match &args.angles {
        Some(text) => parse_list::<f64>(text)?,
        None => config
            .f64_list("tau", "angles")
            .unwrap_or_else(|| vec![0.0, std::f64::consts::FRAC_PI_6]),
    };
    let radii = match &args.radii {
        Some(text) => parse_list::<i32>(text)?,
        None => config
            .i32_list("tau", "radii")
            .unwrap_or_else(|| default_tau_radii(p)),
    };
    Ok(Resolved {
        p,
        angles,
        radii,
        samples: args
            .samples
            .or_else(|| config.u64("tau", "samples"))
            .unwrap_or(100_000),
        seed: resolve_seed(args.seed, config)?,
        out: args
            .out
            .clone()
            .or_else(|| config.string("tau", "out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("perclab-tau.csv")),
    })
}

pub const COLUMNS: [&str; 13] = [
    "schema",
    "angle",
    "p",
    "tau",
    "tau_ci_low",
    "tau_ci_high",
    "slope",
    "slope_se",
    "intercept",
    "r2",
    "ratio_spread",
    "samples",
    "seed",
];

pub fn execute(resolved: &Resolved, runner: &dyn BlockRunner) -> anyhow::Result<Vec<Output>> {
    if !(0.0 < resolved.p && resolved.p < perclab_core::P_CRITICAL) {
        return Err(perclab_core::Error::InvalidParameter(format!(
            "tau requires sub-critical p in (0, 1/2), got {}",
            resolved.p
        ))
        .into());
    }
    let report = isotropy_report(
        resolved.p,
        &resolved.angles,
        &resolved.radii,
        resolved.samples,
        resolved.seed,
        runner,
    )?;
    let record = RunRecord::new("tau", serde_json::to_value(resolved)?, resolved.seed);
    let mut csv = CsvOutput::new(record, &COLUMNS);
    for fit in &report.fits {
        csv.push_row(vec![
            "tau-v1".into(),
            fmt_f64(fit.direction),
            fmt_f64(fit.p),
            fmt_f64(fit.tau),
            fmt_f64(fit.tau_ci_low),
            fmt_f64(fit.tau_ci_high),
            fmt_f64(fit.slope),
            fmt_f64(fit.slope_se),
            fmt_f64(fit.intercept),
            fmt_f64(fit.r2),
            fmt_f64(report.ratio_spread),
            resolved.samples.to_string(),
            resolved.seed.to_string(),
        ]);
    }
    Ok(vec![Output {
        path: resolved.out.clone(),
        content: csv.render()?,
    }])
}

pub fn run(args: &TauArgs, config: &ConfigFile, runner: &dyn BlockRunner) -> anyhow::Result<i32> {
    let resolved = resolve(args, config)?;
    let outputs = execute(&resolved, runner)?;
    for out in &outputs {
        out.write()?;
        println!("wrote {}", out.path.display());
    }
    Ok(0)
}
