//! The eight run commands. Each has a compute step returning plain data and
//! a write step producing its artifacts.

use std::path::PathBuf;

use serde_json::json;

use crate::config::RunConfig;
use crate::error::{LabError, LabResult};
use crate::output::OutputDir;

pub mod evolve;
pub mod morawetz;
pub mod scatter;
pub mod selftest;
pub mod strichartz;
pub mod sweep;
pub mod threshold;
pub mod truncate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Cubic run with per-step energy, L⁴ accumulation and Morawetz potential.
    Evolve,
    /// One truncation-scheme run with its interval ledger.
    Truncate,
    /// Truncation runs over (s, s0) with log-log slope fits.
    Sweep,
    /// Morawetz inequality monitor.
    Morawetz,
    /// Strichartz ratios over the synthetic corpus.
    Strichartz,
    /// Pullback Cauchy table of a cubic run.
    Scatter,
    /// Exact regularity threshold of the bootstrap.
    Threshold,
    /// Quick internal consistency checks.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Truncate => "truncate",
            Command::Sweep => "sweep",
            Command::Morawetz => "morawetz",
            Command::Strichartz => "strichartz",
            Command::Scatter => "scatter",
            Command::Threshold => "threshold",
            Command::Selftest => "selftest",
        }
    }
}

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub workers: usize,
}

/// Validates the configuration for `cmd`, runs it and writes its artifacts.
pub fn run(cmd: Command, ctx: &Context) -> LabResult<()> {
    let cfg = &ctx.config;
    let mut out = OutputDir::create(&ctx.out)?;
    let mut failed = 0;
    match cmd {
        Command::Threshold => threshold::write(&threshold::compute(), &mut out)?,
        Command::Selftest => {
            let report = selftest::compute(cfg.data.seed)?;
            selftest::write(&report, &mut out)?;
            failed = report.failures();
        }
        _ => {
            let grid = cfg.validate_base()?;
            if let Some(w) = cfg.step_warning(&grid) {
                eprintln!("{w}");
            }
            match cmd {
                Command::Evolve => {
                    cfg.check_guard(&grid, cfg.horizon)?;
                    evolve::write(&evolve::compute(cfg, &grid)?, cfg, &mut out)?;
                }
                Command::Truncate => {
                    cfg.check_guard(&grid, cfg.horizon)?;
                    truncate::write(&truncate::compute(cfg, &grid, &cfg.data, true)?, cfg, &mut out)?;
                }
                Command::Sweep => {
                    cfg.validate_sweep()?;
                    cfg.check_guard(&grid, cfg.horizon)?;
                    sweep::write(&sweep::compute(cfg, &grid, ctx.workers)?, &mut out)?;
                }
                Command::Morawetz => {
                    cfg.validate_morawetz()?;
                    cfg.check_guard(&grid, cfg.horizon)?;
                    morawetz::write(&morawetz::compute(cfg, &grid)?, &mut out)?;
                }
                Command::Strichartz => {
                    cfg.validate_strichartz(&grid)?;
                    strichartz::write(&strichartz::compute(cfg, &grid, ctx.workers)?, &mut out)?;
                }
                Command::Scatter => {
                    cfg.validate_scatter(&grid)?;
                    scatter::write(&scatter::compute(cfg, &grid)?, &mut out)?;
                }
                Command::Threshold | Command::Selftest => unreachable!(),
            }
        }
    }
    out.record(json!({
        "record": "run",
        "command": cmd.name(),
        "grid": {"r_max": cfg.r_max, "n": cfg.n},
        "dt": cfg.dt,
        "horizon": cfg.horizon,
        "seed": cfg.data.seed,
    }));
    out.finish()?;
    if failed > 0 {
        return Err(LabError::Checks(failed));
    }
    Ok(())
}
