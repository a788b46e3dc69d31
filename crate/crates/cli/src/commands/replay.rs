//! `perclab replay`: re-run a command from the run record embedded in one
//! of its result files. With `--check`, the regenerated output is compared
//! byte-for-byte (timestamps excluded) against the input file; mismatch is
//! a verification failure.

use crate::commands::{estimate, nearcritical, oracle_verify, tau, wulff, Output};
use crate::record::{strip_timestamps, RunRecord};
use clap::Args;
use perclab_core::runner::BlockRunner;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Result file whose header drives the re-run.
    pub input: PathBuf,
    /// Compare regenerated bytes against the input instead of writing.
    #[arg(long)]
    pub check: bool,
    /// Directory to write regenerated outputs into (default: original paths).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn regenerate(record: &RunRecord, runner: &dyn BlockRunner) -> anyhow::Result<Vec<Output>> {
    match record.cmd.as_str() {
        "estimate" => {
            let resolved: estimate::Resolved = serde_json::from_value(record.spec.clone())?;
            estimate::execute(&resolved, runner)
        }
        "tau" => {
            let resolved: tau::Resolved = serde_json::from_value(record.spec.clone())?;
            tau::execute(&resolved, runner)
        }
        "wulff" => {
            let resolved: wulff::Resolved = serde_json::from_value(record.spec.clone())?;
            wulff::execute(&resolved)
        }
        "nearcritical" => {
            let resolved: nearcritical::Resolved = serde_json::from_value(record.spec.clone())?;
            nearcritical::execute(&resolved, runner)
        }
        "oracle-verify" => {
            let resolved: oracle_verify::Resolved = serde_json::from_value(record.spec.clone())?;
            Ok(oracle_verify::execute(&resolved, runner)?.0)
        }
        other => anyhow::bail!("cannot replay command '{other}'"),
    }
}

/// Timestamp-insensitive content comparison (CSV headers or JSON reports).
fn comparison_key(text: &str) -> String {
    if text.trim_start().starts_with('{') {
        crate::output::json_comparison_key(text).unwrap_or_else(|_| text.to_string())
    } else {
        strip_timestamps(text)
    }
}

pub fn run(args: &ReplayArgs, runner: &dyn BlockRunner) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", args.input.display()))?;
    let record = if text.trim_start().starts_with('{') {
        let doc: serde_json::Value = serde_json::from_str(&text)?;
        serde_json::from_value(
            doc.get("run")
                .cloned()
                .ok_or_else(|| anyhow::anyhow!("no run record in JSON report"))?,
        )?
    } else {
        RunRecord::from_file_text(&text)?
    };
    let outputs = regenerate(&record, runner)?;

    if args.check {
        let wanted = comparison_key(&text);
        let matched = outputs
            .iter()
            .any(|out| comparison_key(&out.content) == wanted);
        if matched {
            println!("replay: reproduced {} byte-for-byte", args.input.display());
            Ok(0)
        } else {
            eprintln!(
                "replay: regenerated output differs from {}",
                args.input.display()
            );
            Ok(crate::EXIT_VERIFICATION)
        }
    } else {
        for out in &outputs {
            let path = match &args.out_dir {
                Some(dir) => dir.join(out.path.file_name().unwrap_or(out.path.as_os_str())),
                None => out.path.clone(),
            };
            let redirected = Output {
                path,
                content: out.content.clone(),
            };
            redirected.write()?;
            println!("wrote {}", redirected.path.display());
        }
        Ok(0)
    }
}
