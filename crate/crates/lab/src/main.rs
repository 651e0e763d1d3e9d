use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use h3wave_lab::pool::default_workers;
use h3wave_lab::{run, Command, Context, LabError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "h3wave", version, about = "Radial cubic wave equation on hyperbolic 3-space")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` configuration file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving the CSV tables and summary.jsonl.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps and the Strichartz suite.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Overrides `data.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match &args.config {
        Some(path) => RunConfig::from_file(path),
        None => Ok(RunConfig::default()),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => return fail(LabError::Config(e)),
    };
    if let Some(seed) = args.seed {
        config.data.seed = seed;
    }
    let ctx = Context {
        config,
        out: args.out,
        workers: args.workers.unwrap_or_else(default_workers).max(1),
    };
    let start = Instant::now();
    match run(args.command, &ctx) {
        Ok(()) => {
            eprintln!("{} finished in {:.2} s", args.command.name(), start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: LabError) -> ExitCode {
    eprintln!("h3wave: {e}");
    ExitCode::from(e.exit_code() as u8)
}
