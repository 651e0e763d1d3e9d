//! Numerical scattering diagnostic.
//!
//! A solution scatters when its linear pullbacks `S(-t)(u(t), u_t(t))`
//! converge as `t` grows. The diagnostic evolves to increasing probe times,
//! pulls each state back to `t = 0` with the free propagator and measures the
//! pairwise distances in `H^{1/2} × H^{-1/2}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evolve::{check_guard, evolve_run, StepPlan, Stepper};
use crate::grid::WaveState;
use crate::norms::pair_norm;
use crate::spectral::wave_propagate;

/// `S(-t)` applied to a state at time `t`.
pub fn pullback(state: &WaveState) -> WaveState {
    let mut back = wave_propagate(state, -state.t);
    back.t = 0.0;
    back
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterTable {
    pub probes: Vec<f64>,
    pub pullbacks: Vec<WaveState>,
    /// `pairwise[i][j] = ‖pullback_i - pullback_j‖_{H^{1/2}×H^{-1/2}}`.
    pub pairwise: Vec<Vec<f64>>,
    /// Distances between consecutive probes.
    pub consecutive: Vec<f64>,
    /// Ratios `consecutive[i] / consecutive[i+1]`.
    pub decay_factors: Vec<f64>,
}

pub fn pullback_table(states: &[WaveState]) -> Result<ScatterTable> {
    let pullbacks: Vec<WaveState> = states.iter().map(pullback).collect();
    let n = pullbacks.len();
    let mut pairwise = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pair_norm(&pullbacks[i].sub(&pullbacks[j])?, 0.5);
            pairwise[i][j] = d;
            pairwise[j][i] = d;
        }
    }
    let consecutive: Vec<f64> = (1..n).map(|i| pairwise[i - 1][i]).collect();
    let decay_factors = consecutive.windows(2).map(|p| p[0] / p[1]).collect();
    Ok(ScatterTable {
        probes: states.iter().map(|s| s.t).collect(),
        pullbacks,
        pairwise,
        consecutive,
        decay_factors,
    })
}

/// Evolves `data` through increasing `probes` and tabulates the pullbacks of
/// the data and of the state at every probe.
pub fn scattering_diagnostic(
    data: &WaveState,
    probes: &[f64],
    dt: f64,
    support: f64,
    stepper: &Stepper<'_>,
) -> Result<ScatterTable> {
    let mut last = data.t;
    for &p in probes {
        if !(p > last) {
            return Err(Error::InvalidParameter {
                name: "scatter.probes",
                value: p,
                reason: "probe times must increase and follow the data time",
            });
        }
        last = p;
    }
    check_guard(data.grid(), support, last - data.t)?;
    let mut states = Vec::with_capacity(probes.len() + 1);
    states.push(data.clone());
    let mut current = data.clone();
    for &p in probes {
        let plan = StepPlan::new(current.t, p, dt)?.guarded(data.grid(), support + current.t - data.t)?;
        current = evolve_run(&current, &plan, stepper, &mut [])?.final_state;
        states.push(current.clone());
    }
    pullback_table(&states)
}
