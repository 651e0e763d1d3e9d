use serde_json::json;

use h3wave::evolve::{evolve_run, DiagnosticRow, DiagnosticsObserver, StepPlan, Stepper};
use h3wave::synth::synthesize;
use h3wave::GridRef;

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::output::{strided, OutputDir};

pub struct EvolveRun {
    pub rows: Vec<DiagnosticRow>,
    pub steps: usize,
    pub dt: f64,
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_drift: f64,
    /// `‖u‖⁴_{L⁴_{t,x}([0,T])}`.
    pub l4_total: f64,
}

pub fn compute(cfg: &RunConfig, grid: &GridRef) -> LabResult<EvolveRun> {
    let data = synthesize(&cfg.data, grid)?;
    let plan = StepPlan::new(0.0, cfg.horizon, cfg.dt)?.guarded(grid, cfg.data.support_radius(grid))?;
    let mut diag = DiagnosticsObserver::new(grid);
    let summary = evolve_run(&data, &plan, &Stepper::Cubic, &mut [&mut diag])?;
    let rows = diag.rows;
    let e0 = rows.first().map_or(0.0, |r| r.energy.total);
    let energy_drift = if e0 > 0.0 {
        rows.iter().map(|r| (r.energy.total - e0).abs()).fold(0.0, f64::max) / e0
    } else {
        0.0
    };
    Ok(EvolveRun {
        l4_total: rows.last().map_or(0.0, |r| r.l4_partial),
        rows,
        steps: summary.steps,
        dt: plan.dt,
        energy_drift,
    })
}

pub fn write(run: &EvolveRun, cfg: &RunConfig, out: &mut OutputDir) -> LabResult<()> {
    let mut csv = out.csv(
        "diagnostics.csv",
        &["t", "E_total", "E_kinetic", "E_gradient", "E_potential", "L4_partial", "M_t"],
    )?;
    for i in strided(run.rows.len(), cfg.output_stride) {
        let r = &run.rows[i];
        let e = &r.energy;
        csv.nums(&[r.t, e.total, e.kinetic, e.gradient, e.potential, r.l4_partial, r.morawetz])?;
    }
    csv.close()?;
    let first = run.rows.first().map_or(0.0, |r| r.energy.total);
    let last = run.rows.last().map_or(0.0, |r| r.energy.total);
    println!(
        "evolve: {} steps of dt = {}, E(0) = {first:.10e}, relative drift {:.3e}, |u|_L4^4 = {:.6e}",
        run.steps, run.dt, run.energy_drift, run.l4_total
    );
    out.record(json!({
        "record": "evolve",
        "steps": run.steps,
        "dt": run.dt,
        "energy_initial": first,
        "energy_final": last,
        "energy_drift": run.energy_drift,
        "l4_total": run.l4_total,
    }));
    Ok(())
}
