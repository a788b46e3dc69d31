//! `perclab wulff`: Wulff polygon from a tau result file.

use crate::commands::Output;
use crate::config::ConfigFile;
use crate::output::{fmt_f64, read_csv_columns, render_json_report, CsvOutput};
use crate::record::{now_iso, RunRecord};
use clap::Args;
use perclab_core::wulff::{halfplane_intersection, SupportSamples};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct WulffArgs {
    /// Input tau CSV (from `perclab tau`) or any CSV with angle,tau columns.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output path prefix; writes <out>.vertices.csv and <out>.metrics.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolved {
    pub input: PathBuf,
    pub out: PathBuf,
}

pub fn resolve(args: &WulffArgs, config: &ConfigFile) -> anyhow::Result<Resolved> {
    Ok(Resolved {
        input: args
            .input
            .clone()
            .or_else(|| config.string("wulff", "input").map(PathBuf::from))
            .ok_or_else(|| anyhow::anyhow!("--input is required"))?,
        out: args
            .out
            .clone()
            .or_else(|| config.string("wulff", "out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("perclab-wulff")),
    })
}

/// Error type signalling "input present but unusable" (exit code 3).
#[derive(Debug)]
pub struct TooFewAngles(pub usize);

impl std::fmt::Display for TooFewAngles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "tau file has {} angles; need at least 3", self.0)
    }
}

impl std::error::Error for TooFewAngles {}

pub fn execute(resolved: &Resolved) -> anyhow::Result<Vec<Output>> {
    let text = std::fs::read_to_string(&resolved.input).map_err(|e| {
        anyhow::anyhow!("cannot read tau file {}: {e}", resolved.input.display())
    })?;
    let cols = read_csv_columns(&text, &["angle", "tau"])?;
    let pairs: Vec<(f64, f64)> = cols[0].iter().copied().zip(cols[1].iter().copied()).collect();
    {
        let mut distinct: Vec<f64> = pairs.iter().map(|(a, _)| *a).collect();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if distinct.len() < 3 {
            return Err(TooFewAngles(distinct.len()).into());
        }
    }
    let samples = SupportSamples::new(pairs)?;
    let polygon = halfplane_intersection(&samples.symmetrized())?;
    let unit = polygon.normalize()?;
    let roundness = polygon.roundness()?;
    let hausdorff = unit.hausdorff_to_disk()?;

    let started = now_iso();
    let record = RunRecord::new("wulff", serde_json::to_value(resolved)?, 0);
    let mut csv = CsvOutput::new(record.clone(), &["schema", "x", "y"]);
    for v in &unit.vertices {
        csv.push_row(vec!["wulff-v1".into(), fmt_f64(v.0), fmt_f64(v.1)]);
    }
    let metrics = serde_json::json!({
        "schema": "wulff-v1",
        "input_angles": samples.samples.len(),
        "halfplanes_after_symmetrization": samples.symmetrized().samples.len(),
        "vertices": unit.vertices.len(),
        "area": polygon.area,
        "roundness": roundness,
        "hausdorff_to_disk": hausdorff,
    });
    Ok(vec![
        Output {
            path: with_suffix(&resolved.out, ".vertices.csv"),
            content: csv.render()?,
        },
        Output {
            path: with_suffix(&resolved.out, ".metrics.json"),
            content: render_json_report(&record, &started, metrics)?,
        },
    ])
}

fn with_suffix(prefix: &PathBuf, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn run(args: &WulffArgs, config: &ConfigFile) -> anyhow::Result<i32> {
    let resolved = resolve(args, config)?;
    let outputs = execute(&resolved)?;
    for out in &outputs {
        out.write()?;
        println!("wrote {}", out.path.display());
    }
    Ok(0)
}
