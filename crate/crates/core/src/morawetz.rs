//! Morawetz weight, potential and inequality monitor.
//!
//! The radial weight solves `Δa = a'' + 2 coth(r) a' = 1` with
//!
//! ```text
//! a'(r) = (∫₀^r sinh²ρ dρ) / sinh²r = (sinh 2r - 2r) / (4 sinh²r)
//! a''(r) = (r cosh r - sinh r) / sinh³r
//! ```
//!
//! The potential is `M(t) = -∫ u_t a' u_r + ½ u_t u dμ`; for solutions of
//! `u_tt - Δu + u³ = N` its derivative is
//! `∫ a'' u_r² dμ + ¼‖u‖₄⁴ - ∫ N a' u_r dμ - ½∫ N u dμ` plus a wall term that
//! vanishes while the data stays away from `r_max`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolve::{Observer, StepPlan};
use crate::grid::{GridRef, WaveState};
use crate::norms::{energy, lq_integral};
use crate::spectral::{self, SpectralField};

const SERIES_CUTOFF: f64 = 0.1;

/// `sinh x - x` without cancellation for small `x`.
fn sinh_minus_x(x: f64) -> f64 {
    if libm::fabs(x) < 2.0 * SERIES_CUTOFF {
        let x2 = x * x;
        // x³/3! + x⁵/5! + ... + x¹³/13!
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        for k in 2..=6 {
            let k = k as f64;
            term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum
    } else {
        libm::sinh(x) - x
    }
}

/// `r cosh r - sinh r` without cancellation for small `r`.
fn r_cosh_minus_sinh(r: f64) -> f64 {
    if libm::fabs(r) < SERIES_CUTOFF {
        // Σ_{k≥1} 2k r^{2k+1} / (2k+1)!
        let r2 = r * r;
        let mut pow_fact = r * r2 / 6.0; // r³/3!
        let mut sum = 2.0 * pow_fact;
        for k in 2..=6 {
            let kf = k as f64;
            pow_fact *= r2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            sum += 2.0 * kf * pow_fact;
        }
        sum
    } else {
        r * libm::cosh(r) - libm::sinh(r)
    }
}

pub fn weight_derivative(r: f64) -> f64 {
    if r > 1.0 {
        // 1/2 - q(2r - 1 + q)/(1 - q)² with q = e^{-2r}; keeps a' ≤ 1/2 in rounding
        let q = libm::exp(-2.0 * r);
        let d = 1.0 - q;
        return 0.5 - q * (2.0 * r - 1.0 + q) / (d * d);
    }
    let s = libm::sinh(r);
    sinh_minus_x(2.0 * r) / (4.0 * s * s)
}

pub fn weight_second_derivative(r: f64) -> f64 {
    let s = libm::sinh(r);
    r_cosh_minus_sinh(r) / (s * s * s)
}

/// Tabulated Morawetz weight on a grid.
#[derive(Debug, Clone)]
pub struct MorawetzWeight {
    grid: GridRef,
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub a_second: Vec<f64>,
    /// `a'(r_max)`.
    pub a_prime_wall: f64,
}

impl MorawetzWeight {
    pub fn build(grid: &GridRef) -> Self {
        let a_prime: Vec<f64> = grid.nodes().iter().map(|&r| weight_derivative(r)).collect();
        let a_second = grid.nodes().iter().map(|&r| weight_second_derivative(r)).collect();
        // cumulative trapezoid from a(0) = 0, a'(0) = 0
        let dr = grid.dr();
        let mut a = Vec::with_capacity(a_prime.len());
        let mut acc = 0.0;
        let mut prev = 0.0;
        for &ap in &a_prime {
            acc += 0.5 * dr * (prev + ap);
            a.push(acc);
            prev = ap;
        }
        MorawetzWeight {
            grid: grid.clone(),
            a,
            a_prime,
            a_second,
            a_prime_wall: weight_derivative(grid.r_max()),
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    /// `a'' + 2 coth(r) a' - 1` at each node.
    pub fn laplacian_residual(&self) -> Vec<f64> {
        self.a_second
            .iter()
            .zip(&self.a_prime)
            .zip(self.grid.sinh().iter().zip(self.grid.cosh()))
            .map(|((a2, a1), (s, c))| a2 + 2.0 * c / s * a1 - 1.0)
            .collect()
    }

    /// Radial Hessian eigenvalues `(a'', a' coth r)` at each node.
    pub fn hessian_eigenvalues(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.a_second
            .iter()
            .zip(&self.a_prime)
            .zip(self.grid.sinh().iter().zip(self.grid.cosh()))
            .map(|((a2, a1), (s, c))| (*a2, a1 * c / s))
    }
}

pub fn build_weight(grid: &GridRef) -> MorawetzWeight {
    MorawetzWeight::build(grid)
}

/// `sinh(r)·u_r = w_r - w coth r` at the nodes.
fn weighted_radial_derivative(w: &[f64], w_r: &[f64], grid: &GridRef) -> Vec<f64> {
    w.iter()
        .zip(w_r)
        .zip(grid.sinh().iter().zip(grid.cosh()))
        .map(|((w, wr), (s, c))| wr - w * c / s)
        .collect()
}

/// `M = -4π Σ [w_t a' (w_r - w coth r) + ½ w_t w] dr`.
pub fn potential(state: &WaveState, wt: &MorawetzWeight) -> f64 {
    let hat = spectral::forward(&state.w);
    potential_with_spectrum(state, &hat, wt)
}

fn potential_with_spectrum(state: &WaveState, hat: &SpectralField, wt: &MorawetzWeight) -> f64 {
    let grid = state.grid();
    let (w_r, _) = spectral::radial_derivative_pair(hat, hat);
    let su_r = weighted_radial_derivative(state.w.values(), &w_r, grid);
    let w = state.w.values();
    let w_t = state.w_t.values();
    -grid.integrate(
        (0..w.len()).map(|i| w_t[i] * wt.a_prime[i] * su_r[i] + 0.5 * w_t[i] * w[i]),
    )
}

/// The four pieces of `dM/dt` and the identities they should satisfy.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MorawetzTerms {
    pub t: f64,
    pub i: f64,
    pub ii: f64,
    pub iii: f64,
    pub iv: f64,
    /// `∫ a'' u_r² dμ ≥ 0`.
    pub hessian: f64,
    pub quarter_l4: f64,
    /// `-∫ N a' u_r dμ - ½ ∫ N u dμ`.
    pub source: f64,
    /// `-2π a'(r_max) w_r(r_max)²`.
    pub wall: f64,
}

impl MorawetzTerms {
    pub fn derivative(&self) -> f64 {
        self.i + self.ii + self.iii + self.iv
    }

    /// Right side of the integrated-by-parts identity for `dM/dt`.
    pub fn identity(&self) -> f64 {
        self.hessian + self.quarter_l4 + self.source + self.wall
    }
}

/// Computes I–IV at one state. `forcing` is the weighted source `sinh(r)·N`.
pub fn decompose(state: &WaveState, wt: &MorawetzWeight, forcing: Option<&[f64]>) -> MorawetzTerms {
    let grid = state.grid();
    let m = grid.len();
    let w = state.w.values();
    let w_t = state.w_t.values();
    let (hat, hat_t) = spectral::forward_pair(&state.w, &state.w_t);
    let (w_r, w_tr) = spectral::radial_derivative_pair(&hat, &hat_t);
    // w_rr - w = -(λ²+1) ŵ
    let lap = spectral::apply_multiplier(&hat, &|l: f64| -(l * l + 1.0)).expect("finite symbol");
    let lap = spectral::inverse(&lap);
    let mut w_tt: Vec<f64> = lap
        .values()
        .iter()
        .zip(w)
        .zip(grid.sinh_sq())
        .map(|((l, w), s2)| l - w * w * w / s2)
        .collect();
    if let Some(f) = forcing {
        w_tt.iter_mut().zip(f).for_each(|(a, f)| *a += f);
    }
    let su_r = weighted_radial_derivative(w, &w_r, grid);
    let su_tr = weighted_radial_derivative(w_t, &w_tr, grid);
    let a1 = &wt.a_prime;
    let i = -grid.integrate((0..m).map(|j| w_tt[j] * a1[j] * su_r[j]));
    let ii = -grid.integrate((0..m).map(|j| w_t[j] * a1[j] * su_tr[j]));
    let iii = -0.5 * grid.integrate((0..m).map(|j| w_tt[j] * w[j]));
    let iv = -0.5 * grid.integrate(w_t.iter().map(|v| v * v));
    let hessian = grid.integrate((0..m).map(|j| wt.a_second[j] * su_r[j] * su_r[j]));
    let source = forcing.map_or(0.0, |f| {
        -grid.integrate((0..m).map(|j| f[j] * (a1[j] * su_r[j] + 0.5 * w[j])))
    });
    let (_, wall_slope) = spectral::boundary_derivative(&hat);
    MorawetzTerms {
        t: state.t,
        i,
        ii,
        iii,
        iv,
        hessian,
        quarter_l4: 0.25 * lq_integral(&state.w, 4.0),
        source,
        wall: -2.0 * core::f64::consts::PI * wt.a_prime_wall * wall_slope * wall_slope,
    }
}

/// Per-step quantities entering the Morawetz inequality.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MorawetzSample {
    pub t: f64,
    pub m: f64,
    pub quarter_l4: f64,
    pub energy: f64,
    /// `‖N u‖_{L¹}`.
    pub err_n_u: f64,
    /// `‖N ∇u‖_{L¹}`.
    pub err_n_grad: f64,
    /// Wall term `-2π a'(r_max) w_r(r_max)²`.
    pub wall: f64,
}

pub fn sample(state: &WaveState, wt: &MorawetzWeight, forcing: Option<&[f64]>) -> MorawetzSample {
    let grid = state.grid();
    let hat = spectral::forward(&state.w);
    let m = potential_with_spectrum(state, &hat, wt);
    let (_, wall_slope) = spectral::boundary_derivative(&hat);
    let (err_n_u, err_n_grad) = match forcing {
        None => (0.0, 0.0),
        Some(f) => {
            let (w_r, _) = spectral::radial_derivative_pair(&hat, &hat);
            let su_r = weighted_radial_derivative(state.w.values(), &w_r, grid);
            let w = state.w.values();
            (
                grid.integrate(f.iter().zip(w).map(|(f, w)| libm::fabs(f * w))),
                grid.integrate(f.iter().zip(&su_r).map(|(f, d)| libm::fabs(f * d))),
            )
        }
    };
    MorawetzSample {
        t: state.t,
        m,
        quarter_l4: 0.25 * lq_integral(&state.w, 4.0),
        energy: energy(state).total,
        err_n_u,
        err_n_grad,
        wall: -2.0 * core::f64::consts::PI * wt.a_prime_wall * wall_slope * wall_slope,
    }
}

/// Weighted source `sinh(r)·N` for the state being observed.
pub type ForcingFn = Box<dyn Fn(&WaveState) -> Result<Vec<f64>>>;

/// Observer collecting [`MorawetzSample`]s every step and the I–IV
/// decomposition at chosen step indices.
pub struct MorawetzProbe {
    weight: MorawetzWeight,
    forcing: Option<ForcingFn>,
    probe_steps: Vec<usize>,
    seen: usize,
    pub samples: Vec<MorawetzSample>,
    pub terms: Vec<MorawetzTerms>,
}

impl MorawetzProbe {
    pub fn new(grid: &GridRef, forcing: Option<ForcingFn>) -> Self {
        MorawetzProbe {
            weight: MorawetzWeight::build(grid),
            forcing,
            probe_steps: Vec::new(),
            seen: 0,
            samples: Vec::new(),
            terms: Vec::new(),
        }
    }

    /// Decomposes `dM/dt` at `count` evenly spaced steps of a plan.
    pub fn with_probes(mut self, plan: &StepPlan, count: usize) -> Self {
        if plan.steps > 2 && count > 0 {
            self.probe_steps = (0..count)
                .map(|j| 1 + j * (plan.steps - 2) / count.max(2).saturating_sub(1).max(1))
                .map(|s| s.min(plan.steps - 1))
                .collect();
            self.probe_steps.dedup();
        }
        self
    }

    pub fn weight(&self) -> &MorawetzWeight {
        &self.weight
    }

    /// Records the next sample of a trajectory whose source is known to the caller.
    pub fn record(&mut self, state: &WaveState, forcing: Option<&[f64]>) {
        self.samples.push(sample(state, &self.weight, forcing));
        if self.probe_steps.contains(&self.seen) {
            self.terms.push(decompose(state, &self.weight, forcing));
        }
        self.seen += 1;
    }
}

impl Observer for MorawetzProbe {
    fn observe(&mut self, state: &WaveState, _plan: &StepPlan) -> Result<()> {
        let forcing = match &self.forcing {
            Some(f) => Some(f(state)?),
            None => None,
        };
        self.record(state, forcing.as_deref());
        Ok(())
    }
}

/// Post-processed Morawetz monitor over a uniformly sampled trajectory.
#[derive(Debug, Clone, Default)]
pub struct MorawetzReport {
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    /// Centered differences in the interior, one-sided at the ends.
    pub dmdt: Vec<f64>,
    pub quarter_l4: Vec<f64>,
    pub err_n_u: Vec<f64>,
    pub err_n_grad: Vec<f64>,
    /// `dM/dt - (¼‖u‖₄⁴ - errors + wall)` per sample.
    pub margin: Vec<f64>,
    pub tolerance: f64,
    /// Fraction of interior samples where the pointwise bound holds within tolerance.
    pub pointwise_fraction: f64,
    /// `‖u‖⁴_{L⁴_{t,x}}` by left Riemann sum.
    pub l4_total: f64,
    pub sup_energy: f64,
    pub sup_abs_m: f64,
    pub err_total: f64,
    /// `‖u‖⁴_{L⁴} / (sup E + errors)`.
    pub c_meas: f64,
    /// `sup |M| / sup E`.
    pub m_to_energy: f64,
    /// `2 sup|M| + 4·errors - ‖u‖⁴_{L⁴}`, from integrating the derivative bound.
    pub integrated_margin: f64,
}

/// `tolerance_factor · dt² · sup E` is the allowance for the pointwise check.
pub fn monitor(samples: &[MorawetzSample], tolerance_factor: f64) -> Result<MorawetzReport> {
    let n = samples.len();
    if n < 2 {
        return Ok(MorawetzReport {
            t: samples.iter().map(|s| s.t).collect(),
            m: samples.iter().map(|s| s.m).collect(),
            dmdt: alloc::vec![0.0; n],
            quarter_l4: samples.iter().map(|s| s.quarter_l4).collect(),
            err_n_u: samples.iter().map(|s| s.err_n_u).collect(),
            err_n_grad: samples.iter().map(|s| s.err_n_grad).collect(),
            margin: alloc::vec![0.0; n],
            pointwise_fraction: 1.0,
            ..Default::default()
        });
    }
    let dt = samples[1].t - samples[0].t;
    if !(dt > 0.0) {
        return Err(Error::NonUniformSampling { index: 1 });
    }
    for (i, w) in samples.windows(2).enumerate() {
        if libm::fabs((w[1].t - w[0].t) - dt) > 1e-9 * dt {
            return Err(Error::NonUniformSampling { index: i + 1 });
        }
    }
    let m: Vec<f64> = samples.iter().map(|s| s.m).collect();
    let dmdt: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                (m[1] - m[0]) / dt
            } else if i == n - 1 {
                (m[n - 1] - m[n - 2]) / dt
            } else {
                (m[i + 1] - m[i - 1]) / (2.0 * dt)
            }
        })
        .collect();
    let sup_energy = samples.iter().map(|s| s.energy).fold(0.0, f64::max);
    let tolerance = tolerance_factor * dt * dt * sup_energy;
    let margin: Vec<f64> = samples
        .iter()
        .zip(&dmdt)
        .map(|(s, d)| d - (s.quarter_l4 - s.err_n_u - s.err_n_grad + s.wall))
        .collect();
    let interior = &margin[1..n - 1];
    let ok = interior.iter().filter(|&&x| x >= -tolerance).count();
    let pointwise_fraction = if interior.is_empty() {
        1.0
    } else {
        ok as f64 / interior.len() as f64
    };
    // left Riemann sums over the n - 1 steps
    let l4_total: f64 = samples[..n - 1].iter().map(|s| 4.0 * s.quarter_l4 * dt).sum();
    let err_total: f64 = samples[..n - 1].iter().map(|s| (s.err_n_u + s.err_n_grad) * dt).sum();
    let sup_abs_m = m.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max);
    let denom = sup_energy + err_total;
    Ok(MorawetzReport {
        t: samples.iter().map(|s| s.t).collect(),
        m,
        dmdt,
        quarter_l4: samples.iter().map(|s| s.quarter_l4).collect(),
        err_n_u: samples.iter().map(|s| s.err_n_u).collect(),
        err_n_grad: samples.iter().map(|s| s.err_n_grad).collect(),
        margin,
        tolerance,
        pointwise_fraction,
        l4_total,
        sup_energy,
        sup_abs_m,
        err_total,
        c_meas: if denom > 0.0 { l4_total / denom } else { 0.0 },
        m_to_energy: if sup_energy > 0.0 { sup_abs_m / sup_energy } else { 0.0 },
        integrated_margin: 2.0 * sup_abs_m + 4.0 * err_total - l4_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{RadialField, RadialGrid};

    #[test]
    fn weight_small_and_large_radius() {
        let r = 1e-3;
        assert!((weight_derivative(r) / r - 1.0 / 3.0).abs() <= 1e-6);
        // series oracle: a'(r) = r/3 - 2r³/45 + O(r⁵)
        let series = r / 3.0 - 2.0 * r.powi(3) / 45.0;
        assert!((weight_derivative(r) - series).abs() < 1e-15);
        let big = weight_derivative(20.0);
        assert!((0.4999..=0.5).contains(&big));
        // branches agree across each switch point; |a''|, |a'''| < 1 so the
        // 2e-12 gap between the evaluation points contributes less than 2e-12
        let c = SERIES_CUTOFF;
        let lo = weight_derivative(c * (1.0 - 1e-12));
        let hi = weight_derivative(c * (1.0 + 1e-12));
        assert!((lo - hi).abs() < 3e-12);
        let lo = weight_derivative(1.0 - 1e-12);
        let hi = weight_derivative(1.0 + 1e-12);
        assert!((lo - hi).abs() < 3e-12);
        let lo = weight_second_derivative(c * (1.0 - 1e-12));
        let hi = weight_second_derivative(c * (1.0 + 1e-12));
        assert!((lo - hi).abs() < 3e-12);
    }

    #[test]
    fn weight_solves_laplace_equation() {
        let g = RadialGrid::new(40.0, 4096).unwrap();
        let wt = MorawetzWeight::build(&g);
        assert!(wt.laplacian_residual().iter().all(|r| r.abs() <= 1e-8));
        // finite-difference a'' as an independent check of the closed form
        let h = 1e-4;
        for &r in g.nodes().iter().step_by(97) {
            let fd = (weight_derivative(r + h) - weight_derivative(r - h)) / (2.0 * h);
            assert!((fd - weight_second_derivative(r)).abs() < 1e-7, "r={r}");
        }
        for (l1, l2) in wt.hessian_eigenvalues() {
            assert!(l1 >= -1e-8 && l2 >= -1e-8);
        }
        assert!(wt.a_prime.iter().all(|&a| a > 0.0 && a <= 0.5));
        assert!(wt.a.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn potential_vanishes_without_velocity() {
        let g = RadialGrid::new(20.0, 512).unwrap();
        let wt = MorawetzWeight::build(&g);
        let w = RadialField::from_fn(&g, |r| r * (-r * r).exp()).unwrap();
        let st = WaveState::new(w, RadialField::zeros(&g), 0.0).unwrap();
        assert_eq!(potential(&st, &wt), 0.0);
        assert_eq!(potential(&WaveState::zeros(&g, 0.0), &wt), 0.0);
    }

    #[test]
    fn monitor_rejects_irregular_sampling() {
        let mk = |t: f64| MorawetzSample { t, ..Default::default() };
        let s = [mk(0.0), mk(0.1), mk(0.25)];
        assert!(matches!(monitor(&s, 10.0), Err(Error::NonUniformSampling { index: 2 })));
        let zeros = [mk(0.0), mk(0.1), mk(0.2)];
        let rep = monitor(&zeros, 10.0).unwrap();
        assert_eq!(rep.pointwise_fraction, 1.0);
        assert_eq!(rep.l4_total, 0.0);
        assert!(rep.m.iter().all(|&m| m == 0.0));
    }
}
