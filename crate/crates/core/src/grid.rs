//! Truncated radial domain `(0, r_max)` with Dirichlet walls at both ends.
//!
//! Fields are stored as the weighted amplitude `w = sinh(r)·u` sampled at the
//! interior nodes `r_i = i·dr`, `i = 1..n-1`. The volume element of ℍ³ in polar
//! coordinates is `sinh²r dr dω`, so `∫ u² dμ = 4π ∫ w² dr`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dst::Trig;
use crate::error::{Error, Result};

/// Smallest accepted interval count.
pub const MIN_INTERVALS: usize = 4;

pub type GridRef = Arc<RadialGrid>;

#[derive(Debug)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
    dr: f64,
    nodes: Vec<f64>,
    sinh: Vec<f64>,
    cosh: Vec<f64>,
    sinh_sq: Vec<f64>,
    lambda: Vec<f64>,
    /// Symbol of `-Δ`: `λ_k² + 1`.
    mu: Vec<f64>,
    pub(crate) trig: Trig,
}

impl RadialGrid {
    /// Uniform grid with spacing `dr = r_max / n` and `n - 1` interior nodes.
    pub fn new(r_max: f64, n: usize) -> Result<GridRef> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                value: r_max,
                reason: "must be positive and finite",
            });
        }
        if n < MIN_INTERVALS {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                reason: "grid needs at least 4 intervals",
            });
        }
        let dr = r_max / n as f64;
        let nodes: Vec<f64> = (1..n).map(|i| i as f64 * dr).collect();
        let sinh: Vec<f64> = nodes.iter().map(|&r| libm::sinh(r)).collect();
        if sinh.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r_max",
                value: r_max,
                reason: "sinh(r_max) overflows",
            });
        }
        let cosh = nodes.iter().map(|&r| libm::cosh(r)).collect();
        let sinh_sq = sinh.iter().map(|s| s * s).collect();
        let lambda: Vec<f64> = (1..n).map(|k| k as f64 * PI / r_max).collect();
        let mu = lambda.iter().map(|l| l * l + 1.0).collect();
        Ok(Arc::new(RadialGrid {
            r_max,
            n,
            dr,
            nodes,
            sinh,
            cosh,
            sinh_sq,
            lambda,
            mu,
            trig: Trig::new(n),
        }))
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Number of intervals; there are `n - 1` interior nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn sinh(&self) -> &[f64] {
        &self.sinh
    }

    pub fn cosh(&self) -> &[f64] {
        &self.cosh
    }

    pub fn sinh_sq(&self) -> &[f64] {
        &self.sinh_sq
    }

    /// Spectral frequencies `λ_k = kπ / r_max`, `k = 1..n-1`.
    pub fn frequencies(&self) -> &[f64] {
        &self.lambda
    }

    /// `λ_k² + 1` for every represented mode.
    pub fn laplacian_symbol(&self) -> &[f64] {
        &self.mu
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        core::ptr::eq(self, other) || (self.n == other.n && self.r_max == other.r_max)
    }

    /// `4π Σ f_i dr`: trapezoid rule with zero endpoints and the angular factor.
    pub fn integrate(&self, f: impl IntoIterator<Item = f64>) -> f64 {
        4.0 * PI * self.dr * f.into_iter().sum::<f64>()
    }
}

/// Weighted radial profile `w = sinh(r)·u` at the interior nodes.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: GridRef,
    values: Vec<f64>,
}

impl PartialEq for RadialField {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid) && self.values == other.values
    }
}

impl RadialField {
    pub fn zeros(grid: &GridRef) -> Self {
        RadialField {
            grid: grid.clone(),
            values: alloc::vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &GridRef, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "field samples" });
        }
        Ok(RadialField {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples a weighted profile `w(r)` at the nodes.
    pub fn from_fn(grid: &GridRef, w: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(grid, grid.nodes.iter().map(|&r| w(r)).collect())
    }

    /// Builds `w_i = sinh(r_i)·u_i` from physical samples.
    pub fn from_physical(grid: &GridRef, u: &[f64]) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: u.len(),
            });
        }
        Self::from_values(grid, u.iter().zip(&grid.sinh).map(|(u, s)| u * s).collect())
    }

    /// `u_i = w_i / sinh(r_i)`.
    pub fn to_physical(&self) -> Vec<f64> {
        self.values.iter().zip(&self.grid.sinh).map(|(w, s)| w / s).collect()
    }

    pub(crate) fn from_raw(grid: &GridRef, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RadialField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn check_grid(&self, other: &RadialField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn add(&self, other: &RadialField) -> Result<RadialField> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(RadialField::from_raw(&self.grid, values))
    }

    pub fn sub(&self, other: &RadialField) -> Result<RadialField> {
        self.check_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(RadialField::from_raw(&self.grid, values))
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        RadialField::from_raw(&self.grid, self.values.iter().map(|v| c * v).collect())
    }

    /// `‖u‖²_{L²(ℍ³)} = 4π Σ w_i² dr`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.integrate(self.values.iter().map(|w| w * w))
    }
}

/// `(u, u_t)` at time `t`, both stored weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub w: RadialField,
    pub w_t: RadialField,
    pub t: f64,
}

impl WaveState {
    pub fn new(w: RadialField, w_t: RadialField, t: f64) -> Result<Self> {
        w.check_grid(&w_t)?;
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "state time" });
        }
        Ok(WaveState { w, w_t, t })
    }

    pub fn zeros(grid: &GridRef, t: f64) -> Self {
        WaveState {
            w: RadialField::zeros(grid),
            w_t: RadialField::zeros(grid),
            t,
        }
    }

    pub fn grid(&self) -> &GridRef {
        self.w.grid()
    }

    /// Componentwise sum; keeps the time of `self`.
    pub fn add(&self, other: &WaveState) -> Result<WaveState> {
        Ok(WaveState {
            w: self.w.add(&other.w)?,
            w_t: self.w_t.add(&other.w_t)?,
            t: self.t,
        })
    }

    pub fn sub(&self, other: &WaveState) -> Result<WaveState> {
        Ok(WaveState {
            w: self.w.sub(&other.w)?,
            w_t: self.w_t.sub(&other.w_t)?,
            t: self.t,
        })
    }

    pub fn scaled(&self, c: f64) -> WaveState {
        WaveState {
            w: self.w.scaled(c),
            w_t: self.w_t.scaled(c),
            t: self.t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.w_t.is_finite()
    }
}
