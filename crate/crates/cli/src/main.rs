use clap::Parser;
use perclab::commands;
use perclab::config::ConfigFile;
use perclab::exec::RayonRunner;
use perclab::{Cli, Command, EXIT_ESTIMATION, EXIT_VALIDATION};

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(classify(&err));
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };
    let workers = cli
        .workers
        .or_else(|| config.usize("run", "workers"))
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    let runner = RayonRunner::new(workers)?;
    match &cli.command {
        Command::Estimate(args) => commands::estimate::run(args, &config, &runner),
        Command::Tau(args) => commands::tau::run(args, &config, &runner),
        Command::Wulff(args) => commands::wulff::run(args, &config),
        Command::Nearcritical(args) => commands::nearcritical::run(args, &config, &runner),
        Command::OracleVerify(args) => commands::oracle_verify::run(args, &config, &runner),
        Command::Replay(args) => commands::replay::run(args, &runner),
    }
}

/// Exit codes: 2 for input/spec validation problems, 3 for runtime
/// estimation failures (verification failures return 1 from the command).
fn classify(err: &anyhow::Error) -> i32 {
    if let Some(core) = err.downcast_ref::<perclab_core::Error>() {
        return match core {
            perclab_core::Error::Estimation(_) | perclab_core::Error::Fit(_) => EXIT_ESTIMATION,
            _ => EXIT_VALIDATION,
        };
    }
    if err.downcast_ref::<commands::wulff::TooFewAngles>().is_some() {
        return EXIT_ESTIMATION;
    }
    EXIT_VALIDATION
}
