//! Time stepping for the free, cubic and forced radial wave equations.
//!
//! In weighted form every system reads `w_tt - w_rr + w = F`, with
//!
//! * `F = 0` for the free wave,
//! * `F = -w³ / sinh²r` for the cubic defocusing equation,
//! * `F` supplied by a [`SourceHook`] for the forced linear equation.
//!
//! Steps are Strang splittings: half kick `w_t += (dt/2) F`, exact spectral
//! rotation over `dt`, half kick with `F` re-evaluated at the new time.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridRef, RadialField, WaveState};
use crate::spectral::wave_propagate;

/// Fixed-step schedule over `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub steps: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Set once the finite-propagation guard has been checked.
    pub guarded: bool,
}

impl StepPlan {
    /// `dt` is shrunk so that the span is an integer number of steps.
    pub fn new(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "time step must be positive and finite",
            });
        }
        if !(t_end >= t_start && t_start.is_finite() && t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                value: t_end,
                reason: "horizon must be finite and not before the start time",
            });
        }
        let span = t_end - t_start;
        let steps = libm::ceil(span / dt - 1e-9).max(0.0) as usize;
        let dt = if steps == 0 { dt } else { span / steps as f64 };
        Ok(StepPlan {
            dt,
            steps,
            t_start,
            t_end,
            guarded: false,
        })
    }

    /// Checks `support + (t_end - t_start) + 1 ≤ r_max`.
    pub fn guarded(mut self, grid: &GridRef, support: f64) -> Result<Self> {
        check_guard(grid, support, self.t_end - self.t_start)?;
        self.guarded = true;
        Ok(self)
    }

    pub fn time(&self, step: usize) -> f64 {
        self.t_start + step as f64 * self.dt
    }
}

/// Data supported in `r ≤ support` cannot reach the wall within `horizon`
/// (unit propagation speed) when `support + horizon + 1 ≤ r_max`.
pub fn check_guard(grid: &GridRef, support: f64, horizon: f64) -> Result<()> {
    if support + horizon + 1.0 <= grid.r_max() {
        Ok(())
    } else {
        Err(Error::GuardViolation {
            support,
            horizon,
            r_max: grid.r_max(),
        })
    }
}

/// Forcing `F` of the weighted equation at a requested time.
pub trait SourceHook {
    fn source(&self, t: f64) -> Result<RadialField>;
}

impl<F: Fn(f64) -> Result<RadialField>> SourceHook for F {
    fn source(&self, t: f64) -> Result<RadialField> {
        self(t)
    }
}

/// `-w³ / sinh²r` at every node.
pub fn cubic_forcing(w: &RadialField) -> Vec<f64> {
    w.values()
        .iter()
        .zip(w.grid().sinh_sq())
        .map(|(w, s2)| -(w * w * w) / s2)
        .collect()
}

pub(crate) fn kick(w_t: &mut RadialField, force: &[f64], h: f64) {
    for (v, f) in w_t.values_mut().iter_mut().zip(force) {
        *v += h * f;
    }
}

fn check_finite(state: &WaveState) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::BlowUp { t: state.t })
    }
}

pub fn step_linear(state: &WaveState, dt: f64) -> WaveState {
    wave_propagate(state, dt)
}

/// One Strang step of `w_tt - w_rr + w + w³/sinh²r = 0`. Negative `dt` runs backwards.
pub fn step_cubic(state: &WaveState, dt: f64) -> Result<WaveState> {
    let mut mid = state.clone();
    kick(&mut mid.w_t, &cubic_forcing(&state.w), 0.5 * dt);
    let mut out = wave_propagate(&mid, dt);
    let force = cubic_forcing(&out.w);
    kick(&mut out.w_t, &force, 0.5 * dt);
    check_finite(&out)?;
    Ok(out)
}

/// One Strang step of the forced linear equation with source sampled at both endpoints.
pub fn step_forced(state: &WaveState, src: &dyn SourceHook, dt: f64) -> Result<WaveState> {
    let start = src.source(state.t)?;
    let end = src.source(state.t + dt)?;
    step_forced_with(state, start.values(), end.values(), dt)
}

/// Forced step with explicit endpoint forcings.
pub fn step_forced_with(state: &WaveState, start: &[f64], end: &[f64], dt: f64) -> Result<WaveState> {
    if start.iter().chain(end).any(|f| !f.is_finite()) {
        return Err(Error::NonFinite { context: "source term" });
    }
    let mut mid = state.clone();
    kick(&mut mid.w_t, start, 0.5 * dt);
    let mut out = wave_propagate(&mid, dt);
    kick(&mut out.w_t, end, 0.5 * dt);
    check_finite(&out)?;
    Ok(out)
}

pub enum Stepper<'a> {
    Linear,
    Cubic,
    Forced(&'a dyn SourceHook),
}

impl Stepper<'_> {
    pub fn step(&self, state: &WaveState, dt: f64) -> Result<WaveState> {
        match self {
            Stepper::Linear => Ok(step_linear(state, dt)),
            Stepper::Cubic => step_cubic(state, dt),
            Stepper::Forced(src) => step_forced(state, *src, dt),
        }
    }
}

/// Called on the initial state and after every step.
pub trait Observer {
    fn observe(&mut self, state: &WaveState, plan: &StepPlan) -> Result<()>;
}

impl<F: FnMut(&WaveState, &StepPlan) -> Result<()>> Observer for F {
    fn observe(&mut self, state: &WaveState, plan: &StepPlan) -> Result<()> {
        self(state, plan)
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub final_state: WaveState,
    pub steps: usize,
    pub observer_calls: usize,
}

pub fn evolve_run(
    state: &WaveState,
    plan: &StepPlan,
    stepper: &Stepper<'_>,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary> {
    if matches!(stepper, Stepper::Cubic) && !plan.guarded && plan.steps > 0 {
        return Err(Error::GuardViolation {
            support: f64::NAN,
            horizon: plan.t_end - plan.t_start,
            r_max: state.grid().r_max(),
        });
    }
    if libm::fabs(state.t - plan.t_start) > 1e-12 * (1.0 + libm::fabs(plan.t_start)) {
        return Err(Error::Desynchronized {
            expected: plan.t_start,
            found: state.t,
        });
    }
    let mut current = state.clone();
    let mut calls = 0;
    for obs in observers.iter_mut() {
        obs.observe(&current, plan)?;
    }
    calls += 1;
    for step in 0..plan.steps {
        let mut next = stepper.step(&current, plan.dt)?;
        // pin the clock to the plan to avoid drift from repeated addition
        next.t = plan.time(step + 1);
        current = next;
        for obs in observers.iter_mut() {
            obs.observe(&current, plan)?;
        }
        calls += 1;
    }
    Ok(RunSummary {
        final_state: current,
        steps: plan.steps,
        observer_calls: calls,
    })
}

/// Records the energy breakdown at every observed state.
#[derive(Debug, Default, Clone)]
pub struct EnergyObserver {
    pub series: Vec<(f64, crate::norms::EnergyBreakdown)>,
}

impl Observer for EnergyObserver {
    fn observe(&mut self, state: &WaveState, _plan: &StepPlan) -> Result<()> {
        self.series.push((state.t, crate::norms::energy(state)));
        Ok(())
    }
}

impl EnergyObserver {
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub fn relative_drift(&self) -> f64 {
        let Some((_, e0)) = self.series.first() else {
            return 0.0;
        };
        if e0.total == 0.0 {
            return 0.0;
        }
        self.series
            .iter()
            .map(|(_, e)| libm::fabs(e.total - e0.total))
            .fold(0.0, f64::max)
            / e0.total
    }
}

/// One row of the per-step diagnostics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub energy: crate::norms::EnergyBreakdown,
    /// `Σ dt ‖u(t_i)‖₄⁴` over the steps before `t`.
    pub l4_partial: f64,
    /// Morawetz potential.
    pub morawetz: f64,
}

/// Energy, running L⁴ accumulation and Morawetz potential at every step.
pub struct DiagnosticsObserver {
    weight: crate::morawetz::MorawetzWeight,
    l4: crate::norms::SpaceTimeAccumulator,
    pending: f64,
    pub rows: Vec<DiagnosticRow>,
}

impl DiagnosticsObserver {
    pub fn new(grid: &GridRef) -> Self {
        DiagnosticsObserver {
            weight: crate::morawetz::MorawetzWeight::build(grid),
            l4: crate::norms::SpaceTimeAccumulator::new(4.0, 4.0).expect("valid exponents"),
            pending: 0.0,
            rows: Vec::new(),
        }
    }
}

impl Observer for DiagnosticsObserver {
    fn observe(&mut self, state: &WaveState, plan: &StepPlan) -> Result<()> {
        self.l4.partial += self.pending;
        let l4_now = crate::norms::lq_integral(&state.w, 4.0);
        self.pending = plan.dt * l4_now;
        self.rows.push(DiagnosticRow {
            t: state.t,
            energy: crate::norms::energy(state),
            l4_partial: self.l4.partial,
            morawetz: crate::morawetz::potential(state, &self.weight),
        });
        Ok(())
    }
}

/// Keeps copies of the states observed at the listed step indices.
pub struct Snapshots {
    at: Vec<usize>,
    seen: usize,
    pub states: Vec<WaveState>,
}

impl Snapshots {
    pub fn new(at: Vec<usize>) -> Self {
        Snapshots {
            at,
            seen: 0,
            states: Vec::new(),
        }
    }
}

impl Observer for Snapshots {
    fn observe(&mut self, state: &WaveState, _plan: &StepPlan) -> Result<()> {
        if self.at.contains(&self.seen) {
            self.states.push(state.clone());
        }
        self.seen += 1;
        Ok(())
    }
}

/// Boxed source from a fixed weighted forcing profile, constant in time.
pub fn constant_source(f: RadialField) -> Box<dyn SourceHook> {
    Box::new(move |_t: f64| Ok(f.clone()))
}
