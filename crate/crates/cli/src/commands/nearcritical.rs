//! `perclab nearcritical`: crossing probabilities and ball-connection
//! estimates at `p = p_c − λ·r̂(n)` over a (λ, n) grid.
//!
//! Crossing boxes use the exact-aspect convention (n columns × 2n rows) so
//! that estimates at different n share one limiting shape; the λ grid at
//! each n is sampled with common random numbers, making the λ-monotonicity
//! exact per sample.

use crate::commands::Output;
use crate::config::{parse_list, resolve_seed, ConfigFile};
use crate::output::{fmt_f64, CsvOutput};
use crate::record::RunRecord;
use clap::Args;
use perclab_core::estimators::{estimate_event_multi_p, estimate_f, estimate_r};
use perclab_core::events::EventSpec;
use perclab_core::lattice::Parallelogram;
use perclab_core::rng::child_seed;
use perclab_core::runner::BlockRunner;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct NearCriticalArgs {
    /// Comma-separated λ grid.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Comma-separated box sizes n.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Ball-to-ball aspect δ (|u| = 1/δ); set 0 to skip the f table.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Samples per estimate.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolved {
    pub lambdas: Vec<f64>,
    pub sizes: Vec<i32>,
    pub delta: f64,
    pub samples: u64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn resolve(args: &NearCriticalArgs, config: &ConfigFile) -> anyhow::Result<Resolved> {
    let lambdas = match &args.lambdas {
        Some(text) => parse_list::<f64>(text)?,
        None => config
            .f64_list("nearcritical", "lambdas")
            .unwrap_or_else(|| vec![0.0, 1.0, 2.0, 4.0]),
    };
    let sizes = match &args.sizes {
        Some(text) => parse_list::<i32>(text)?,
        None => config
            .i32_list("nearcritical", "sizes")
            .unwrap_or_else(|| vec![16, 32]),
    };
    Ok(Resolved {
        lambdas,
        sizes,
        delta: args
            .delta
            .or_else(|| config.f64("nearcritical", "delta"))
            .unwrap_or(0.5),
        samples: args
            .samples
            .or_else(|| config.u64("nearcritical", "samples"))
            .unwrap_or(20_000),
        seed: resolve_seed(args.seed, config)?,
        out: args
            .out
            .clone()
            .or_else(|| config.string("nearcritical", "out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("perclab-nearcritical.csv")),
    })
}

pub const COLUMNS: [&str; 12] = [
    "schema", "table", "n", "lambda", "delta", "r_hat", "p", "p_hat", "ci_low", "ci_high",
    "samples", "seed",
];

/// Crossing box of the near-critical experiment: n columns × 2n rows.
pub fn crossing_box(n: i32) -> Parallelogram {
    Parallelogram {
        m1: 0,
        m2: n - 1,
        n1: 0,
        n2: 2 * n - 1,
    }
}

pub fn execute(resolved: &Resolved, runner: &dyn BlockRunner) -> anyhow::Result<Vec<Output>> {
    for &l in &resolved.lambdas {
        if l < 0.0 {
            return Err(perclab_core::Error::InvalidParameter(format!(
                "lambda = {l} < 0"
            ))
            .into());
        }
    }
    let record = RunRecord::new(
        "nearcritical",
        serde_json::to_value(resolved)?,
        resolved.seed,
    );
    let mut csv = CsvOutput::new(record, &COLUMNS);
    for (i, &n) in resolved.sizes.iter().enumerate() {
        let rate = estimate_r(
            n,
            resolved.samples,
            child_seed(resolved.seed, 0x0A00 + i as u64),
            runner,
        )?;
        let ps: Vec<f64> = resolved
            .lambdas
            .iter()
            .map(|l| perclab_core::P_CRITICAL - l * rate.r_hat)
            .collect();
        if let Some(bad) = ps.iter().find(|p| !(0.0 < **p && **p <= 0.5)) {
            return Err(perclab_core::Error::InvalidParameter(format!(
                "near-critical p = {bad} out of (0, 1/2] at n = {n}"
            ))
            .into());
        }
        let zone = crossing_box(n);
        let event = EventSpec::crossing_hor(zone);
        let ests = estimate_event_multi_p(
            &event,
            zone,
            &ps,
            resolved.samples,
            child_seed(resolved.seed, 0x0B00 + i as u64),
            runner,
        )?;
        for ((lambda, p), est) in resolved.lambdas.iter().zip(&ps).zip(&ests) {
            csv.push_row(vec![
                "nearcritical-v1".into(),
                "crossing".into(),
                n.to_string(),
                fmt_f64(*lambda),
                String::new(),
                fmt_f64(rate.r_hat),
                fmt_f64(*p),
                fmt_f64(est.p_hat),
                fmt_f64(est.ci_low),
                fmt_f64(est.ci_high),
                resolved.samples.to_string(),
                resolved.seed.to_string(),
            ]);
        }
        if resolved.delta > 0.0 {
            for (j, &lambda) in resolved.lambdas.iter().enumerate() {
                let f = estimate_f(
                    lambda,
                    resolved.delta,
                    n,
                    0.0,
                    resolved.samples,
                    child_seed(resolved.seed, 0x0C00 + (i * 64 + j) as u64),
                    runner,
                )?;
                csv.push_row(vec![
                    "nearcritical-v1".into(),
                    "f".into(),
                    n.to_string(),
                    fmt_f64(lambda),
                    fmt_f64(resolved.delta),
                    fmt_f64(f.r_hat),
                    fmt_f64(f.p),
                    fmt_f64(f.estimate.p_hat),
                    fmt_f64(f.estimate.ci_low),
                    fmt_f64(f.estimate.ci_high),
                    resolved.samples.to_string(),
                    resolved.seed.to_string(),
                ]);
            }
        }
    }
    Ok(vec![Output {
        path: resolved.out.clone(),
        content: csv.render()?,
    }])
}

pub fn run(
    args: &NearCriticalArgs,
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
