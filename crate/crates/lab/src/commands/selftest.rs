use serde_json::json;

use h3wave::evolve::{constant_source, evolve_run, EnergyObserver, StepPlan, Stepper};
use h3wave::spectral::{self, SpectralField};
use h3wave::synth::{field_corpus, synthesize, DataSpec};
use h3wave::threshold::{threshold_calculator, Q};
use h3wave::truncation::{init_decomposition, run_truncation, SchemeParams};
use h3wave::{GridRef, RadialGrid, WaveState};

use crate::checks::{self, BernsteinCorpusRow, PoincareRow};
use crate::error::LabResult;
use crate::output::{num, OutputDir};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    /// `true` when the value must not exceed the limit, `false` when it must reach it.
    pub upper: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Check { name, value, limit, upper: true }
    }

    fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Check { name, value, limit, upper: false }
    }

    pub fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.limit
        } else {
            self.value >= self.limit
        }
    }
}

pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub poincare: Vec<PoincareRow>,
    pub bernstein: Vec<BernsteinCorpusRow>,
}

impl SelftestReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

/// `g (1 - cos ωt) / ω²` against a forced run of a single mode from rest.
pub fn duhamel_error(grid: &GridRef, k: usize, g: f64, t: f64, dt: f64) -> LabResult<f64> {
    let mode = SpectralField::unit_mode(grid, k)?;
    let source = constant_source(spectral::inverse(&mode).scaled(g));
    let plan = StepPlan::new(0.0, t, dt)?;
    let rest = WaveState::zeros(grid, 0.0);
    let end = evolve_run(&rest, &plan, &Stepper::Forced(source.as_ref()), &mut [])?.final_state;
    let omega_sq = grid.laplacian_symbol()[k - 1];
    let exact = g * (1.0 - (omega_sq.sqrt() * t).cos()) / omega_sq;
    let measured = spectral::forward(&end.w).coeffs()[k - 1];
    Ok((measured - exact).abs() / exact.abs())
}

/// Largest relative energy drift of a cubic run of `data`.
pub fn cubic_drift(data: &WaveState, horizon: f64, dt: f64, support: f64) -> LabResult<f64> {
    let plan = StepPlan::new(0.0, horizon, dt)?.guarded(data.grid(), support)?;
    let mut energy = EnergyObserver::default();
    evolve_run(data, &plan, &Stepper::Cubic, &mut [&mut energy])?;
    Ok(energy.relative_drift())
}

pub fn compute(seed: u64) -> LabResult<SelftestReport> {
    let grid = RadialGrid::new(20.0, 1024)?;
    let corpus = field_corpus(&grid, 50, seed)?;
    let mut checks = vec![
        Check::at_most("transform_roundtrip", checks::roundtrip_error(&corpus), 1e-12),
        Check::at_most("plancherel", checks::plancherel_error(&corpus), 1e-12),
        Check::at_most("multiplier_roundtrip", checks::multiplier_roundtrip_error(&corpus, 2f64.powi(-6)), 1e-13),
    ];

    let (violations, poincare) = checks::poincare(&corpus, &[-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0], 1e-12);
    checks.push(Check::at_most("poincare_violations", violations as f64, 0.0));

    // the smallest scale needs modes up to s(λ²+1) ≈ 1.26, hence the finer grid
    let fine = RadialGrid::new(20.0, 2048)?;
    let scales = checks::bernstein_scales();
    let (low, high) = checks::bernstein_mode_max(&fine, &scales);
    checks.push(Check::at_most("bernstein_mode_low", low, 1.0));
    checks.push(Check::at_most("bernstein_mode_grad_high", high, 1.0));
    checks.push(Check::at_most(
        "bernstein_report_vs_closed_form",
        checks::bernstein_mode_consistency(&fine, &scales, 61),
        1e-12,
    ));
    let bernstein = checks::bernstein_corpus_max(&checks::bernstein_corpus(&fine, seed), &scales);
    let stable = |f: fn(&BernsteinCorpusRow) -> f64| {
        let v: Vec<f64> = bernstein.iter().map(f).collect();
        if checks::window_stable(&v, 4, 0.1) { 1.0 } else { 0.0 }
    };
    checks.push(Check::at_least("bernstein_corpus_low_stable", stable(|r| r.ratio_low), 1.0));
    checks.push(Check::at_least("bernstein_corpus_grad_high_stable", stable(|r| r.ratio_grad_high), 1.0));

    let bump = synthesize(&DataSpec::bump(1.0, 2.0), &grid)?;
    let moving = WaveState::new(bump.w.clone(), bump.w.scaled(0.5), 0.0)?;
    checks.push(Check::at_most("propagator_energy_per_step", checks::propagator_energy_step(&moving, 1e-2, 200), 1e-13));
    checks.push(Check::at_most("group_law_1000_steps", checks::group_law_error(&moving, 1e-3, 1000), 1e-12));
    checks.push(Check::at_most("weight_residual", checks::weight_residual(&grid), 1e-8));
    checks.push(Check::at_least("weight_hessian_min", checks::weight_hessian_min(&grid), -1e-8));
    checks.push(Check::at_most("duhamel_single_mode", duhamel_error(&grid, 3, 0.7, 1.0, 1e-3)?, 1e-4));
    checks.push(Check::at_most("cubic_energy_drift", cubic_drift(&bump, 1.0, 1e-3, 2.0)?, 1e-6));

    let small = RadialGrid::new(20.0, 512)?;
    let spec = DataSpec { seed, support: 4.0, amplitude: 3.0, ..Default::default() };
    let data = synthesize(&spec, &small)?;
    let params = SchemeParams { s0: 2f64.powi(-6), epsilon: 0.05, t_max: 4.0 };
    let mut dec = init_decomposition(&data, params)?;
    let plan = StepPlan::new(0.0, 2.0, 5e-3)?.guarded(&small, spec.support)?;
    run_truncation(&mut dec, &plan, |_, _| Ok(()))?;
    checks.push(Check::at_most("decomposition_identity", dec.identity_max, 1e-9));

    let q = threshold_calculator();
    checks.push(Check::at_most("threshold_182_201", if q == Q::new(182, 201) { 0.0 } else { 1.0 }, 0.0));

    Ok(SelftestReport { checks, poincare, bernstein })
}

pub fn write(report: &SelftestReport, out: &mut OutputDir) -> LabResult<()> {
    let mut csv = out.csv("selftest.csv", &["check", "value", "limit", "kind", "passed"])?;
    for c in &report.checks {
        let kind = if c.upper { "max" } else { "min" };
        csv.row([c.name.to_string(), num(c.value), num(c.limit), kind.to_string(), c.passed().to_string()])?;
        println!(
            "{} {:<34} {:>12.4e} ({} {:e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            if c.upper { "<=" } else { ">=" },
            c.limit
        );
        out.record(json!({
            "record": "check",
            "check": c.name,
            "value": c.value,
            "limit": c.limit,
            "kind": kind,
            "passed": c.passed(),
        }));
    }
    csv.close()?;

    let mut poincare = out.csv("poincare.csv", &["field", "sigma", "norm"])?;
    for r in &report.poincare {
        poincare.row([r.field.to_string(), num(r.sigma), num(r.norm)])?;
    }
    poincare.close()?;

    let mut bernstein = out.csv("bernstein.csv", &["s", "ratio_low", "ratio_grad_high"])?;
    for r in &report.bernstein {
        bernstein.nums(&[r.s, r.ratio_low, r.ratio_grad_high])?;
    }
    bernstein.close()?;
    Ok(())
}
