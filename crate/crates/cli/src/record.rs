//! Run records: every result file embeds the resolved command, seed, code
//! version, and RNG algorithm, so any output can be reproduced from its own
//! header (see the `replay` subcommand).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const RNG_ALGORITHM: &str = "philox4x64-10";
pub const FILE_MAGIC: &str = "# perclab-result v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    /// Content hash of (command, resolved args, seed).
    pub run_id: String,
    /// Subcommand name.
    pub cmd: String,
    /// Resolved arguments, echoing every input that affects the result.
    pub spec: serde_json::Value,
    pub version: String,
    pub rng: String,
    pub seed: u64,
}

impl RunRecord {
    pub fn new(cmd: &str, spec: serde_json::Value, seed: u64) -> Self {
        let canonical = format!("{cmd}|{spec}|{seed}");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let run_id: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        RunRecord {
            run_id,
            cmd: cmd.to_string(),
            spec,
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_ALGORITHM.to_string(),
            seed,
        }
    }

    pub fn header_lines(&self, started: &str, finished: &str) -> String {
        let run_json = serde_json::to_string(self).expect("record serializes");
        format!("{FILE_MAGIC}\n# run: {run_json}\n# started: {started}\n# finished: {finished}\n")
    }

    /// Parses the record back out of a result file's comment header.
    pub fn from_file_text(text: &str) -> anyhow::Result<RunRecord> {
        for line in text.lines() {
            if let Some(json) = line.strip_prefix("# run: ") {
                return Ok(serde_json::from_str(json)?);
            }
            if !line.starts_with('#') {
                break;
            }
        }
        anyhow::bail!("no '# run:' header line found")
    }
}

pub fn now_iso() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
}

/// Strips volatile timestamp lines so reruns can be compared byte-for-byte.
pub fn strip_timestamps(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# started:") && !l.starts_with("# finished:"))
        .collect::<Vec<_>>()
        .join("\n")
}
