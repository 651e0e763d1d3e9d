//! Deterministic synthetic initial data.
//!
//! Power-law data has coefficients `ŵ_k = σ_k (λ_k²+1)^{-(s/2+1/4)}` and
//! `ŵ_t,k = τ_k (λ_k²+1)^{-((s-1)/2+1/4)}` for `k ≥ k_min`, so that
//! `Σ_k (λ_k²+1)^σ ŵ_k²` behaves like `Σ k^{2(σ-s)-1}`: finite for `σ < s`,
//! logarithmically divergent at `σ = s`. Signs come from a hash of
//! `(seed, k)`. The profile is cut off smoothly at `support` and then
//! rescaled to `pair_norm(·, s) = amplitude`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridRef, RadialField, WaveState};
use crate::norms::pair_norm;
use crate::spectral::{self, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    PowerLaw,
    /// `u = A exp(1 - 1/(1 - (r/R)²))` on `r < R`, `u_t = 0`; `A` is the peak value.
    Bump,
    /// Mode `k_min` in `w`, zero velocity.
    SingleMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSpec {
    pub kind: DataKind,
    pub s: f64,
    pub seed: u64,
    pub k_min: usize,
    pub amplitude: f64,
    /// Bump radius, or the cutoff radius of power-law data.
    pub support: f64,
}

impl Default for DataSpec {
    fn default() -> Self {
        DataSpec {
            kind: DataKind::PowerLaw,
            s: 0.95,
            seed: 0,
            k_min: 1,
            amplitude: 1.0,
            support: 8.0,
        }
    }
}

impl DataSpec {
    pub fn bump(amplitude: f64, radius: f64) -> Self {
        DataSpec {
            kind: DataKind::Bump,
            amplitude,
            support: radius,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "data.s",
                value: self.s,
                reason: "regularity must lie in (0, 1]",
            });
        }
        if self.k_min < 1 {
            return Err(Error::InvalidParameter {
                name: "data.k_min",
                value: self.k_min as f64,
                reason: "lowest mode index starts at 1",
            });
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "data.amplitude",
                value: self.amplitude,
                reason: "amplitude must be non-negative and finite",
            });
        }
        if !(self.support > 0.0 && self.support.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "data.support",
                value: self.support,
                reason: "support radius must be positive and finite",
            });
        }
        Ok(())
    }

    /// Radius outside which the data vanishes, for the propagation guard.
    pub fn support_radius(&self, grid: &GridRef) -> f64 {
        match self.kind {
            DataKind::SingleMode => grid.r_max(),
            DataKind::Bump | DataKind::PowerLaw => self.support.min(grid.r_max()),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// `±1` determined by `(seed, stream, k)`.
pub fn sign(seed: u64, stream: u64, k: usize) -> f64 {
    let h = splitmix64(splitmix64(seed ^ stream.wrapping_mul(0xd6e8_feb8_6659_fd93)) ^ k as u64);
    if h >> 63 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unscaled power-law coefficients before the spatial cutoff.
pub fn power_law_profile(spec: &DataSpec, grid: &GridRef) -> (SpectralField, SpectralField) {
    let ew = -(spec.s / 2.0 + 0.25);
    let ev = -((spec.s - 1.0) / 2.0 + 0.25);
    let mut a = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for (i, &mu) in grid.laplacian_symbol().iter().enumerate() {
        let k = i + 1;
        if k < spec.k_min {
            a.push(0.0);
            b.push(0.0);
        } else {
            a.push(sign(spec.seed, 0, k) * libm::pow(mu, ew));
            b.push(sign(spec.seed, 1, k) * libm::pow(mu, ev));
        }
    }
    (
        SpectralField::from_coeffs(grid, a).expect("finite power law"),
        SpectralField::from_coeffs(grid, b).expect("finite power law"),
    )
}

/// Smooth cutoff equal to 1 on `r ≤ R - 1` and 0 on `r ≥ R`.
pub fn cutoff(r: f64, radius: f64) -> f64 {
    let width = radius.min(1.0);
    let x = (radius - r) / width;
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let f = |t: f64| if t <= 0.0 { 0.0 } else { libm::exp(-1.0 / t) };
        f(x) / (f(x) + f(1.0 - x))
    }
}

fn bump_profile(r: f64, radius: f64) -> f64 {
    let x = r / radius;
    if x >= 1.0 {
        0.0
    } else {
        libm::exp(1.0 - 1.0 / (1.0 - x * x))
    }
}

pub fn synthesize(spec: &DataSpec, grid: &GridRef) -> Result<WaveState> {
    spec.validate()?;
    match spec.kind {
        DataKind::Bump => {
            let (a, radius) = (spec.amplitude, spec.support);
            let w = RadialField::from_fn(grid, |r| a * libm::sinh(r) * bump_profile(r, radius))?;
            Ok(WaveState::new(w, RadialField::zeros(grid), 0.0)?)
        }
        DataKind::SingleMode => {
            if spec.k_min > grid.len() {
                return Err(Error::InvalidParameter {
                    name: "data.k_min",
                    value: spec.k_min as f64,
                    reason: "mode index exceeds the grid resolution",
                });
            }
            let w = spectral::inverse(&SpectralField::unit_mode(grid, spec.k_min)?);
            let state = WaveState::new(w, RadialField::zeros(grid), 0.0)?;
            rescale(state, spec)
        }
        DataKind::PowerLaw => {
            let (a, b) = power_law_profile(spec, grid);
            let (w, w_t) = spectral::inverse_pair(&a, &b);
            let window: Vec<f64> = grid.nodes().iter().map(|&r| cutoff(r, spec.support)).collect();
            let cut = |f: RadialField| {
                let v = f.values().iter().zip(&window).map(|(x, c)| x * c).collect();
                RadialField::from_values(grid, v)
            };
            let state = WaveState::new(cut(w)?, cut(w_t)?, 0.0)?;
            rescale(state, spec)
        }
    }
}

fn rescale(state: WaveState, spec: &DataSpec) -> Result<WaveState> {
    let norm = pair_norm(&state, spec.s);
    if !(norm > 0.0) {
        return Err(Error::InvalidParameter {
            name: "data.k_min",
            value: spec.k_min as f64,
            reason: "synthesized profile vanishes on this grid",
        });
    }
    Ok(state.scaled(spec.amplitude / norm))
}

/// Mixed deterministic corpus of `count` fields (the `w` components): bumps of
/// several radii, cut-off power laws over a range of `s` and seeds, and single
/// modes at geometrically spaced indices.
pub fn field_corpus(grid: &GridRef, count: usize, seed: u64) -> Result<Vec<RadialField>> {
    let r_max = grid.r_max();
    let modes = grid.len();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let j = i / 3;
        let spec = match i % 3 {
            0 => DataSpec::bump(1.0, (0.5 + 0.75 * j as f64).min(r_max / 2.0)),
            1 => DataSpec {
                s: 0.3 + 0.7 * ((j * 7) % 11) as f64 / 10.0,
                seed: seed.wrapping_add(i as u64),
                support: (r_max / 2.0).max(1.0),
                ..Default::default()
            },
            _ => DataSpec {
                kind: DataKind::SingleMode,
                k_min: (libm::round(libm::pow(modes as f64, j as f64 / 16.0)) as usize).clamp(1, modes),
                ..Default::default()
            },
        };
        out.push(synthesize(&spec, grid)?.w);
    }
    Ok(out)
}
