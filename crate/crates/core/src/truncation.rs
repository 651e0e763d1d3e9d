//! Fourier truncation scheme.
//!
//! The data is split as `ψ(0) = (I - e^{s₀Δ}) data`, `φ(0) = e^{s₀Δ} data`.
//! `ψ` is a free wave for all time, `φ` solves the cubic equation and the
//! correction `v = u - ψ - φ` solves the forced linear equation
//!
//! ```text
//! v_tt - Δv = -(u³ - φ³),   v(b_j) = 0
//! ```
//!
//! Every split step kicks `u` with `F(u)`, `φ` with `F(φ)` and `v` with
//! `F(u) - F(φ)` at the same nodes, so `u = ψ + φ + v` telescopes step by
//! step. Time is cut into intervals on which `‖u‖⁴_{L⁴_{t,x}}` reaches `ε`;
//! at each cut `v` is folded into `φ` and restarted from zero.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolve::{cubic_forcing, kick, StepPlan};
use crate::grid::{RadialField, WaveState};
use crate::norms::{energy, energy_with_spectra, lq_integral, lq_norm, SpaceTimeAccumulator};
use crate::projections::split_state;
use crate::spectral::{self, wave_propagate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub s0: f64,
    /// Per-interval budget for `‖u‖⁴_{L⁴_{t,x}}`.
    pub epsilon: f64,
    /// Longest allowed interval.
    pub t_max: f64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            s0: 1.0 / 64.0,
            epsilon: 0.1,
            t_max: 4.0,
        }
    }
}

impl SchemeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.s0 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "scheme.s0",
                value: self.s0,
                reason: "truncation scale must be non-negative",
            });
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scheme.epsilon",
                value: self.epsilon,
                reason: "interval threshold must be positive",
            });
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "scheme.t_max",
                value: self.t_max,
                reason: "maximal interval length must be positive",
            });
        }
        Ok(())
    }
}

/// One closed interval `[b_j, b_{j+1}]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntervalRecord {
    pub j: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    /// `‖u‖⁴_{L⁴_{t,x}(I_j)}`.
    pub l4_acc: f64,
    pub e_phi_start: f64,
    /// `E(φ(b_{j+1}⁻))`, before the correction is folded in.
    pub e_phi_end: f64,
    pub sup_e_v: f64,
    /// `E(φ + v) - E(φ)` at `t_end`.
    pub d_e: f64,
    pub sup_v_l4: f64,
    /// `‖ψ‖_{L⁴_{t,x}(I_j)}`.
    pub psi_l4: f64,
    /// `‖φ‖_{L^{8/3}_t L⁸_x(I_j)}`.
    pub phi_strichartz: f64,
    /// `‖v‖_{L⁴_{t,x}(I_j)}`.
    pub v_l4: f64,
    /// `‖v‖_{L^{8/3}_t L⁸_x(I_j)}`.
    pub v_strichartz: f64,
    /// Pieces of `d_e`: `E(v)`, `∫∇φ·∇v`, `∫φ_t v_t`, `¼∫(φ+v)⁴ - φ⁴ - v⁴`.
    pub e_v_end: f64,
    pub cross_grad: f64,
    pub cross_kin: f64,
    pub cross_quartic: f64,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepRow {
    pub t: f64,
    pub j: usize,
    pub identity_error: f64,
    pub e_u: f64,
    pub e_phi: f64,
    pub e_v: f64,
    pub l4_interval: f64,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub u: WaveState,
    pub psi: WaveState,
    pub phi: WaveState,
    pub v: WaveState,
    pub params: SchemeParams,
    /// Current interval index, starting at 1.
    pub j: usize,
    pub interval_start: f64,
    interval_steps: usize,
    l4_interval: f64,
    l4_total: f64,
    psi_l4: SpaceTimeAccumulator,
    phi_strichartz: SpaceTimeAccumulator,
    v_l4: SpaceTimeAccumulator,
    v_strichartz: SpaceTimeAccumulator,
    sup_e_v: f64,
    sup_v_l4: f64,
    e_phi_start: f64,
    /// Largest `‖u - (ψ+φ+v)‖₂ / ‖u‖₂` seen so far.
    pub identity_max: f64,
    pub records: Vec<IntervalRecord>,
}

fn l2(w: &RadialField) -> f64 {
    libm::sqrt(lq_integral(w, 2.0))
}

pub fn init_decomposition(data: &WaveState, params: SchemeParams) -> Result<Decomposition> {
    params.validate()?;
    let split = split_state(data, params.s0)?;
    let grid = data.grid();
    let phi = split.lo;
    let e_phi_start = energy(&phi).total;
    Ok(Decomposition {
        u: data.clone(),
        psi: split.hi,
        v: WaveState::zeros(grid, data.t),
        phi,
        params,
        j: 1,
        interval_start: data.t,
        interval_steps: 0,
        l4_interval: 0.0,
        l4_total: 0.0,
        psi_l4: SpaceTimeAccumulator::new(4.0, 4.0)?,
        phi_strichartz: SpaceTimeAccumulator::new(8.0 / 3.0, 8.0)?,
        v_l4: SpaceTimeAccumulator::new(4.0, 4.0)?,
        v_strichartz: SpaceTimeAccumulator::new(8.0 / 3.0, 8.0)?,
        sup_e_v: 0.0,
        sup_v_l4: 0.0,
        e_phi_start,
        identity_max: 0.0,
        records: Vec::new(),
    })
}

impl Decomposition {
    pub fn t(&self) -> f64 {
        self.u.t
    }

    /// `‖u - (ψ+φ+v)‖₂ / ‖u‖₂`, or the absolute error when `u = 0`.
    pub fn identity_error(&self) -> Result<f64> {
        let sum = self.psi.add(&self.phi)?.add(&self.v)?;
        let diff = l2(&self.u.w.sub(&sum.w)?);
        let norm = l2(&self.u.w);
        Ok(if norm > 0.0 { diff / norm } else { diff })
    }

    pub fn l4_total(&self) -> f64 {
        self.l4_total
    }

    pub fn l4_interval(&self) -> f64 {
        self.l4_interval
    }

    /// `ζ = φ + v`, the part of `u` that carries finite energy.
    pub fn zeta(&self) -> Result<WaveState> {
        self.phi.add(&self.v)
    }

    /// Weighted source `sinh(r)·N = (w_ζ³ - w_u³)/sinh²r` of `ζ_tt - Δζ + ζ³ = N`.
    pub fn zeta_forcing(&self, zeta: &WaveState) -> Vec<f64> {
        let fu = cubic_forcing(&self.u.w);
        let fz = cubic_forcing(&zeta.w);
        fu.iter().zip(&fz).map(|(a, b)| a - b).collect()
    }

    fn check_sync(&self) -> Result<()> {
        let t = self.u.t;
        for other in [&self.psi, &self.phi, &self.v] {
            if libm::fabs(other.t - t) > 1e-12 * (1.0 + libm::fabs(t)) {
                return Err(Error::Desynchronized {
                    expected: t,
                    found: other.t,
                });
            }
        }
        Ok(())
    }

    /// Advances all four components by one split step.
    pub fn advance(&mut self, dt: f64) -> Result<StepRow> {
        self.check_sync()?;
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                value: dt,
                reason: "time step must be positive",
            });
        }
        // left-endpoint space-time accumulation on the current interval
        let l4_step = dt * lq_integral(&self.u.w, 4.0);
        self.l4_interval += l4_step;
        self.l4_total += l4_step;
        self.psi_l4.feed(&self.psi, dt)?;
        self.phi_strichartz.feed(&self.phi, dt)?;
        self.v_l4.feed(&self.v, dt)?;
        self.v_strichartz.feed(&self.v, dt)?;

        let f_u0 = cubic_forcing(&self.u.w);
        let f_phi0 = cubic_forcing(&self.phi.w);
        let f_v0: Vec<f64> = f_u0.iter().zip(&f_phi0).map(|(a, b)| a - b).collect();

        let h = 0.5 * dt;
        let mut u = self.u.clone();
        let mut phi = self.phi.clone();
        let mut v = self.v.clone();
        kick(&mut u.w_t, &f_u0, h);
        kick(&mut phi.w_t, &f_phi0, h);
        kick(&mut v.w_t, &f_v0, h);
        let mut u = wave_propagate(&u, dt);
        let mut phi = wave_propagate(&phi, dt);
        let mut v = wave_propagate(&v, dt);
        let psi = wave_propagate(&self.psi, dt);
        let f_u1 = cubic_forcing(&u.w);
        let f_phi1 = cubic_forcing(&phi.w);
        let f_v1: Vec<f64> = f_u1.iter().zip(&f_phi1).map(|(a, b)| a - b).collect();
        kick(&mut u.w_t, &f_u1, h);
        kick(&mut phi.w_t, &f_phi1, h);
        kick(&mut v.w_t, &f_v1, h);
        for st in [&u, &phi, &v] {
            if !st.is_finite() {
                return Err(Error::BlowUp { t: st.t });
            }
        }
        self.u = u;
        self.phi = phi;
        self.v = v;
        self.psi = psi;
        self.interval_steps += 1;

        let e_v = energy(&self.v).total;
        self.sup_e_v = self.sup_e_v.max(e_v);
        self.sup_v_l4 = self.sup_v_l4.max(lq_norm(&self.v.w, 4.0)?);
        let err = self.identity_error()?;
        self.identity_max = self.identity_max.max(err);
        Ok(StepRow {
            t: self.u.t,
            j: self.j,
            identity_error: err,
            e_u: energy(&self.u).total,
            e_phi: energy(&self.phi).total,
            e_v,
            l4_interval: self.l4_interval,
        })
    }

    /// Closes the current interval if its budget or length is exhausted, or
    /// unconditionally when `force` is set.
    pub fn maybe_close_interval(&mut self, force: bool) -> Result<Option<IntervalRecord>> {
        let length = self.u.t - self.interval_start;
        let due = self.l4_interval >= self.params.epsilon
            || length >= self.params.t_max * (1.0 - 1e-12);
        if !(force || due) {
            return Ok(None);
        }
        let (phi_hat, phi_t_hat) = spectral::forward_pair(&self.phi.w, &self.phi.w_t);
        let (v_hat, v_t_hat) = spectral::forward_pair(&self.v.w, &self.v.w_t);
        let e_phi = energy_with_spectra(&self.phi, &phi_hat, &phi_t_hat).total;
        let e_v = energy_with_spectra(&self.v, &v_hat, &v_t_hat).total;
        let merged = self.phi.add(&self.v)?;
        let e_merged = energy(&merged).total;
        let grid = self.u.grid();
        let four_pi = 4.0 * core::f64::consts::PI;
        let mu = grid.laplacian_symbol();
        let cross_grad = four_pi
            * phi_hat.coeffs().iter().zip(v_hat.coeffs()).zip(mu).map(|((a, b), m)| m * a * b).sum::<f64>();
        let cross_kin = four_pi * phi_t_hat.coeffs().iter().zip(v_t_hat.coeffs()).map(|(a, b)| a * b).sum::<f64>();
        let cross_quartic = 0.25
            * grid.integrate(
                self.phi
                    .w
                    .values()
                    .iter()
                    .zip(self.v.w.values())
                    .zip(grid.sinh_sq())
                    .map(|((p, v), s2)| {
                        let m = p + v;
                        (m * m * m * m - p * p * p * p - v * v * v * v) / s2
                    }),
            );
        let record = IntervalRecord {
            j: self.j,
            t_start: self.interval_start,
            t_end: self.u.t,
            steps: self.interval_steps,
            l4_acc: self.l4_interval,
            e_phi_start: self.e_phi_start,
            e_phi_end: e_phi,
            sup_e_v: self.sup_e_v,
            d_e: e_merged - e_phi,
            sup_v_l4: self.sup_v_l4,
            psi_l4: self.psi_l4.norm(),
            phi_strichartz: self.phi_strichartz.norm(),
            v_l4: self.v_l4.norm(),
            v_strichartz: self.v_strichartz.norm(),
            e_v_end: e_v,
            cross_grad,
            cross_kin,
            cross_quartic,
        };
        self.records.push(record);
        // fold the correction into the low mode and restart it
        self.phi = merged;
        self.v = WaveState::zeros(grid, self.u.t);
        self.j += 1;
        self.interval_start = self.u.t;
        self.interval_steps = 0;
        self.l4_interval = 0.0;
        self.psi_l4.reset(self.j);
        self.phi_strichartz.reset(self.j);
        self.v_l4.reset(self.j);
        self.v_strichartz.reset(self.j);
        self.sup_e_v = 0.0;
        self.sup_v_l4 = 0.0;
        self.e_phi_start = e_merged;
        Ok(Some(record))
    }
}

/// Drives a decomposition over a plan, closing intervals as they fill and
/// the last one at the horizon. `on_step` sees the decomposition after every
/// step, before an interval closed at that step is folded in.
pub fn run_truncation(
    dec: &mut Decomposition,
    plan: &StepPlan,
    mut on_step: impl FnMut(&Decomposition, &StepRow) -> Result<()>,
) -> Result<()> {
    if !plan.guarded && plan.steps > 0 {
        return Err(Error::GuardViolation {
            support: f64::NAN,
            horizon: plan.t_end - plan.t_start,
            r_max: dec.u.grid().r_max(),
        });
    }
    for step in 0..plan.steps {
        let mut row = dec.advance(plan.dt)?;
        let t = plan.time(step + 1);
        for st in [&mut dec.u, &mut dec.psi, &mut dec.phi, &mut dec.v] {
            st.t = t;
        }
        row.t = t;
        on_step(dec, &row)?;
        dec.maybe_close_interval(step + 1 == plan.steps)?;
    }
    if plan.steps == 0 {
        dec.maybe_close_interval(true)?;
    }
    Ok(())
}

/// Measured quantity next to the power of `s₀` it is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub measured: f64,
    pub predicted_scale: f64,
}

impl Comparison {
    pub fn ratio(&self) -> f64 {
        self.measured / self.predicted_scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub records: Vec<IntervalRecord>,
    pub intervals: usize,
    pub total_d_e: f64,
    pub max_d_e: f64,
    pub sup_e_phi: f64,
    pub sup_e_v: f64,
    pub sup_v_l4: f64,
    pub sup_psi_l4: f64,
    /// `sup_j ‖v‖_{L⁴_{t,x}(I_j)}`.
    pub sup_v_l4_st: f64,
    /// `sup_j ‖v‖_{L^{8/3}_t L⁸_x(I_j)}`.
    pub sup_v_strichartz: f64,
    /// `sup_j ‖φ‖_{L^{8/3}_t L⁸_x(I_j)}`.
    pub sup_phi_strichartz: f64,
    /// `‖u‖⁴_{L⁴_{t,x}}` over the whole run.
    pub l4_total: f64,
    pub identity_max: f64,
    /// `ceil(‖u‖⁴_{L⁴}/ε) + 1`.
    pub interval_bound: usize,
    /// `E(φ)(end) - E(φ)(0) - Σ ΔE_j`, the drift of the cubic stepper on `φ`.
    pub phi_drift: f64,
    /// `sup E(φ)` against `s₀^{-(1-s)}`.
    pub low_energy: Comparison,
    /// `sup_j sup_t E(v)` against `s₀^{(7/4)s - 3/2}`.
    pub correction_energy: Comparison,
    /// `Σ ΔE` against `(M/ε) s₀^{(19/16)s - 9/8}` with `M = ‖u‖⁴_{L⁴}`.
    pub increment: Comparison,
    /// `sup_j ‖ψ‖_{L⁴(I_j)}` against `s₀^{(s - 1/2)/2}`.
    pub high_l4: Comparison,
}

pub fn ledger_report(dec: &Decomposition, s: f64) -> EnergyLedger {
    let recs = &dec.records;
    let max = |f: fn(&IntervalRecord) -> f64| recs.iter().map(f).fold(0.0, f64::max);
    let total_d_e: f64 = recs.iter().map(|r| r.d_e).sum();
    let sup_e_phi = recs
        .iter()
        .flat_map(|r| [r.e_phi_start, r.e_phi_end])
        .chain(core::iter::once(energy(&dec.phi).total))
        .fold(0.0, f64::max);
    let phi_drift = match (recs.first(), recs.last()) {
        (Some(first), Some(_)) => energy(&dec.phi).total - first.e_phi_start - total_d_e,
        _ => 0.0,
    };
    let s0 = dec.params.s0;
    let eps = dec.params.epsilon;
    let pw = |e: f64| libm::pow(s0, e);
    let l4_total = dec.l4_total;
    let sup_e_v = max(|r| r.sup_e_v);
    let sup_psi_l4 = max(|r| r.psi_l4);
    EnergyLedger {
        records: recs.clone(),
        intervals: recs.len(),
        total_d_e,
        max_d_e: recs.iter().map(|r| libm::fabs(r.d_e)).fold(0.0, f64::max),
        sup_e_phi,
        sup_e_v,
        sup_v_l4: max(|r| r.sup_v_l4),
        sup_psi_l4,
        sup_v_l4_st: max(|r| r.v_l4),
        sup_v_strichartz: max(|r| r.v_strichartz),
        sup_phi_strichartz: max(|r| r.phi_strichartz),
        l4_total,
        identity_max: dec.identity_max,
        interval_bound: libm::ceil(l4_total / eps) as usize + 1,
        phi_drift,
        low_energy: Comparison {
            measured: sup_e_phi,
            predicted_scale: pw(-(1.0 - s)),
        },
        correction_energy: Comparison {
            measured: sup_e_v,
            predicted_scale: pw(1.75 * s - 1.5),
        },
        increment: Comparison {
            measured: total_d_e,
            predicted_scale: l4_total / eps * pw(19.0 / 16.0 * s - 9.0 / 8.0),
        },
        high_l4: Comparison {
            measured: sup_psi_l4,
            predicted_scale: pw(0.5 * (s - 0.5)),
        },
    }
}
