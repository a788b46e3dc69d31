//! Experiment campaigns, result persistence, and the verification battery
//! for the percolation laboratory. The algorithmic core lives in
//! `perclab-core`; this crate adds the thread pool, file formats, and the
//! `perclab` command-line interface.

pub mod commands;
pub mod config;
pub mod event_args;
pub mod exec;
pub mod output;
pub mod record;

use clap::{Parser, Subcommand};

/// Exit code for verification failures.
pub const EXIT_VERIFICATION: i32 = 1;
/// Exit code for input validation failures.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code for runtime estimation failures.
pub const EXIT_ESTIMATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "perclab",
    version,
    about = "Site-percolation laboratory on the triangular lattice"
)]
pub struct Cli {
    /// Number of worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Config file with defaults for any flag (TOML; flags override).
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo estimate of a single event probability.
    Estimate(commands::estimate::EstimateArgs),
    /// Directional correlation lengths and their spread.
    Tau(commands::tau::TauArgs),
    /// Wulff polygon from a tau result file.
    Wulff(commands::wulff::WulffArgs),
    /// Near-critical crossing and ball-connection tables.
    Nearcritical(commands::nearcritical::NearCriticalArgs),
    /// Exact-enumeration verification battery.
    OracleVerify(commands::oracle_verify::OracleVerifyArgs),
    /// Re-run a command from a result file's embedded header.
    Replay(commands::replay::ReplayArgs),
}
