//! Sine-transform calculus for radial fields.
//!
//! Under `w = sinh(r)·u` the radial Laplace–Beltrami operator becomes
//! `-Δ ↦ -∂_r² + 1` with Dirichlet conditions, which the orthonormal type-I sine
//! transform diagonalizes exactly:
//!
//! ```text
//! ŵ_k = √(2/r_max) · dr · Σ_i w_i sin(λ_k r_i)        λ_k = kπ / r_max
//! w_i = √(2/r_max) · Σ_k ŵ_k sin(λ_k r_i)
//! ```
//!
//! with `Σ_k ŵ_k² = dr Σ_i w_i²` and `-Δ` acting as multiplication by `λ_k² + 1`.
//! This is the radial Fourier transform of the truncated problem; the
//! Harish-Chandra density is absorbed into the weight `sinh r`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridRef, RadialField, WaveState};

/// Orthonormal sine coefficients of a [`RadialField`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridRef,
    coeffs: Vec<f64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.grid.same_as(&other.grid) && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(grid: &GridRef) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![0.0; grid.len()],
        }
    }

    pub fn from_coeffs(grid: &GridRef, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "spectral coefficients" });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// The `k`-th basis function (`k` is 1-based, as in `λ_k = kπ / r_max`).
    pub fn unit_mode(grid: &GridRef, k: usize) -> Result<Self> {
        if k == 0 || k > grid.len() {
            return Err(Error::InvalidParameter {
                name: "mode",
                value: k as f64,
                reason: "mode index outside 1..n-1",
            });
        }
        let mut f = Self::zeros(grid);
        f.coeffs[k - 1] = 1.0;
        Ok(f)
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn frequencies(&self) -> &[f64] {
        self.grid.frequencies()
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `Σ_k ŵ_k²`.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

fn forward_scale(grid: &GridRef) -> f64 {
    libm::sqrt(2.0 / grid.r_max()) * grid.dr()
}

/// `√(2/r_max)`, taken as the exact reciprocal of the forward scale times
/// `n/2` so that a round trip carries no systematic scale error.
fn inverse_scale(grid: &GridRef) -> f64 {
    2.0 / (grid.n() as f64 * forward_scale(grid))
}

pub fn forward(f: &RadialField) -> SpectralField {
    forward_pair(f, f).0
}

pub fn inverse(f: &SpectralField) -> RadialField {
    inverse_pair(f, f).0
}

/// Transforms two fields on the same grid with one FFT.
pub fn forward_pair(a: &RadialField, b: &RadialField) -> (SpectralField, SpectralField) {
    let grid = a.grid();
    debug_assert!(grid.same_as(b.grid()));
    let m = grid.len();
    let (mut sa, mut sb) = (vec![0.0; m], vec![0.0; m]);
    grid.trig.sine_pair(a.values(), b.values(), &mut sa, &mut sb);
    let c = forward_scale(grid);
    sa.iter_mut().chain(sb.iter_mut()).for_each(|x| *x *= c);
    (
        SpectralField { grid: grid.clone(), coeffs: sa },
        SpectralField { grid: grid.clone(), coeffs: sb },
    )
}

pub fn inverse_pair(a: &SpectralField, b: &SpectralField) -> (RadialField, RadialField) {
    let grid = &a.grid;
    debug_assert!(grid.same_as(&b.grid));
    let m = grid.len();
    let (mut sa, mut sb) = (vec![0.0; m], vec![0.0; m]);
    grid.trig.sine_pair(&a.coeffs, &b.coeffs, &mut sa, &mut sb);
    let c = inverse_scale(grid);
    sa.iter_mut().chain(sb.iter_mut()).for_each(|x| *x *= c);
    (RadialField::from_raw(grid, sa), RadialField::from_raw(grid, sb))
}

/// `∂_r w` at the interior nodes, by differentiating the sine series term by term.
pub fn radial_derivative_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let grid = &a.grid;
    let m = grid.len();
    let lam = grid.frequencies();
    let da: Vec<f64> = a.coeffs.iter().zip(lam).map(|(c, l)| c * l).collect();
    let db: Vec<f64> = b.coeffs.iter().zip(lam).map(|(c, l)| c * l).collect();
    let (mut ca, mut cb) = (vec![0.0; m], vec![0.0; m]);
    grid.trig.cosine_pair(&da, &db, &mut ca, &mut cb);
    let c = inverse_scale(grid);
    ca.iter_mut().chain(cb.iter_mut()).for_each(|x| *x *= c);
    (ca, cb)
}

/// `∂_r w` at `r = 0` and at `r = r_max`.
pub fn boundary_derivative(f: &SpectralField) -> (f64, f64) {
    let c = inverse_scale(&f.grid);
    let (mut left, mut right) = (0.0, 0.0);
    for (k, (a, l)) in f.coeffs.iter().zip(f.grid.frequencies()).enumerate() {
        left += a * l;
        // cos(λ_k r_max) = cos(kπ) with k = index + 1
        right += if k % 2 == 0 { -a * l } else { a * l };
    }
    (c * left, c * right)
}

/// A real symbol `λ ↦ m(λ)` evaluated at the grid frequencies.
pub trait Multiplier {
    fn symbol(&self, lambda: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Multiplier for F {
    fn symbol(&self, lambda: f64) -> f64 {
        self(lambda)
    }
}

/// `e^{sΔ}`: symbol `e^{-s(λ²+1)}`.
#[derive(Debug, Clone, Copy)]
pub struct Heat(pub f64);

impl Multiplier for Heat {
    fn symbol(&self, lambda: f64) -> f64 {
        // underflows to zero for large arguments, which is the correct limit
        libm::exp(-self.0 * (lambda * lambda + 1.0))
    }
}

/// `I - e^{sΔ}`, computed as `-expm1` so that small `s` keeps full precision.
#[derive(Debug, Clone, Copy)]
pub struct HeatComplement(pub f64);

impl Multiplier for HeatComplement {
    fn symbol(&self, lambda: f64) -> f64 {
        -libm::expm1(-self.0 * (lambda * lambda + 1.0))
    }
}

/// `(-sΔ) e^{sΔ}`.
#[derive(Debug, Clone, Copy)]
pub struct HeatBand(pub f64);

impl Multiplier for HeatBand {
    fn symbol(&self, lambda: f64) -> f64 {
        let x = self.0 * (lambda * lambda + 1.0);
        x * libm::exp(-x)
    }
}

/// `(-Δ)^{σ/2}`: symbol `(λ²+1)^{σ/2}`.
#[derive(Debug, Clone, Copy)]
pub struct LaplacianPower(pub f64);

impl Multiplier for LaplacianPower {
    fn symbol(&self, lambda: f64) -> f64 {
        libm::pow(lambda * lambda + 1.0, 0.5 * self.0)
    }
}

pub fn apply_multiplier(f: &SpectralField, m: &impl Multiplier) -> Result<SpectralField> {
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    for (c, &l) in f.coeffs.iter().zip(f.grid.frequencies()) {
        let s = m.symbol(l);
        if !s.is_finite() {
            return Err(Error::NonFinite { context: "multiplier symbol" });
        }
        coeffs.push(c * s);
    }
    Ok(SpectralField {
        grid: f.grid.clone(),
        coeffs,
    })
}

/// Applies a multiplier in physical space (transform, multiply, invert).
pub fn filter(f: &RadialField, m: &impl Multiplier) -> Result<RadialField> {
    Ok(inverse(&apply_multiplier(&forward(f), m)?))
}

pub(crate) fn check_scale(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "s",
            value: s,
            reason: "heat-flow scale must be finite and non-negative",
        })
    }
}

/// `e^{sΔ} f`.
pub fn heat_flow(f: &RadialField, s: f64) -> Result<RadialField> {
    check_scale(s)?;
    filter(f, &Heat(s))
}

/// `(-Δ)^{σ/2} f`. Any real `σ` is allowed since the spectrum is bounded below by 1.
pub fn fractional_laplacian(f: &RadialField, sigma: f64) -> Result<RadialField> {
    filter(f, &LaplacianPower(sigma))
}

/// Exact free evolution over time `t`: every mode rotates with `ω_k = √(λ_k²+1)`.
pub fn wave_propagate(state: &WaveState, t: f64) -> WaveState {
    let (mut a, mut b) = forward_pair(&state.w, &state.w_t);
    rotate(&mut a, &mut b, t);
    let (w, w_t) = inverse_pair(&a, &b);
    WaveState {
        w,
        w_t,
        t: state.t + t,
    }
}

/// Applies the free flow to coefficient pairs in place.
pub fn rotate(w: &mut SpectralField, w_t: &mut SpectralField, t: f64) {
    let mu = w.grid.laplacian_symbol();
    for ((a, b), &m) in w.coeffs.iter_mut().zip(w_t.coeffs.iter_mut()).zip(mu) {
        let omega = libm::sqrt(m);
        let (s, c) = libm::sincos(omega * t);
        let (x, v) = (*a, *b);
        *a = x * c + v * s / omega;
        *b = -x * omega * s + v * c;
    }
}

/// `Σ (λ_k²+1) ŵ_k² + Σ ŵ_{t,k}²`, the quadratic energy without the `2π` factor.
pub fn quadratic_energy(w: &SpectralField, w_t: &SpectralField) -> f64 {
    let mu = w.grid.laplacian_symbol();
    w.coeffs
        .iter()
        .zip(&w_t.coeffs)
        .zip(mu)
        .map(|((a, b), m)| m * a * a + b * b)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use core::f64::consts::PI;

    fn grid() -> GridRef {
        RadialGrid::new(20.0, 512).unwrap()
    }

    fn wiggly(g: &GridRef) -> RadialField {
        RadialField::from_fn(g, |r| (1.3 * r).sin() * (-(r - 4.0).powi(2)).exp() + 0.2 * r * (-r).exp())
            .unwrap()
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn first_basis_function_maps_to_unit_vector() {
        let g = grid();
        let lam = g.frequencies()[0];
        let c = (2.0 / g.r_max()).sqrt();
        let f = RadialField::from_fn(&g, |r| c * (lam * r).sin()).unwrap();
        let hat = forward(&f);
        assert!((hat.coeffs()[0] - 1.0).abs() < 1e-13);
        assert!(hat.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
        assert!(forward(&RadialField::zeros(&g)).coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = grid();
        let f = wiggly(&g);
        let hat = forward(&f);
        let back = inverse(&hat);
        let scale = f.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_abs_diff(back.values(), f.values()) <= 1e-12 * scale);
        let lhs = hat.norm_sq();
        let rhs = g.dr() * f.values().iter().map(|v| v * v).sum::<f64>();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn laplacian_symbol_and_inverse() {
        let g = grid();
        let k = 7;
        let mode = SpectralField::unit_mode(&g, k).unwrap();
        let lap = apply_multiplier(&mode, &|l: f64| l * l + 1.0).unwrap();
        let lam = k as f64 * PI / g.r_max();
        assert!((lap.coeffs()[k - 1] - (lam * lam + 1.0)).abs() < 1e-12);

        let f = forward(&wiggly(&g));
        let there = apply_multiplier(&f, &|l: f64| l * l + 1.0).unwrap();
        let back = apply_multiplier(&there, &|l: f64| 1.0 / (l * l + 1.0)).unwrap();
        let scale = f.coeffs().iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_abs_diff(back.coeffs(), f.coeffs()) <= 1e-13 * scale);
        assert_eq!(apply_multiplier(&f, &|_l: f64| 1.0).unwrap(), f);

        let err = apply_multiplier(&f, &|l: f64| 1.0 / (l - g.frequencies()[3]));
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn heat_flow_cases() {
        let g = grid();
        let f = wiggly(&g);
        assert!(max_abs_diff(heat_flow(&f, 0.0).unwrap().values(), f.values()) < 1e-14);
        assert!(heat_flow(&f, -0.1).is_err());

        let k = 5;
        let mode = SpectralField::unit_mode(&g, k).unwrap();
        let mu = g.laplacian_symbol()[k - 1];
        let out = forward(&heat_flow(&inverse(&mode), 1.0).unwrap());
        assert!((out.coeffs()[k - 1] - (-mu).exp()).abs() < 1e-14);

        // semigroup law
        let a = heat_flow(&heat_flow(&f, 0.03).unwrap(), 0.05).unwrap();
        let b = heat_flow(&f, 0.08).unwrap();
        let scale = b.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_abs_diff(a.values(), b.values()) <= 1e-13 * scale);
    }

    #[test]
    fn fractional_powers() {
        let g = grid();
        let f = wiggly(&g);
        let id = fractional_laplacian(&f, 0.0).unwrap();
        assert!(max_abs_diff(id.values(), f.values()) < 1e-14);
        let k = 9;
        let mode = inverse(&SpectralField::unit_mode(&g, k).unwrap());
        let two = forward(&fractional_laplacian(&mode, 2.0).unwrap());
        assert!((two.coeffs()[k - 1] - g.laplacian_symbol()[k - 1]).abs() < 1e-12);
        let back = fractional_laplacian(&fractional_laplacian(&f, 1.0).unwrap(), -1.0).unwrap();
        let scale = f.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_abs_diff(back.values(), f.values()) <= 1e-13 * scale);
        // strongly negative powers flush to zero instead of failing
        assert!(fractional_laplacian(&f, -400.0).unwrap().is_finite());
    }

    #[test]
    fn propagator_cases() {
        let g = grid();
        let state = WaveState::new(wiggly(&g), wiggly(&g).scaled(-0.5), 0.0).unwrap();
        let same = wave_propagate(&state, 0.0);
        assert!(max_abs_diff(same.w.values(), state.w.values()) < 1e-14);

        let k = 3;
        let omega = g.laplacian_symbol()[k - 1].sqrt();
        let mode = WaveState::new(
            inverse(&SpectralField::unit_mode(&g, k).unwrap()),
            RadialField::zeros(&g),
            0.0,
        )
        .unwrap();
        let half = wave_propagate(&mode, PI / omega);
        let (a, b) = forward_pair(&half.w, &half.w_t);
        assert!((a.coeffs()[k - 1] + 1.0).abs() < 1e-13);
        assert!(b.coeffs()[k - 1].abs() < 1e-13);
        assert!((half.t - PI / omega).abs() < 1e-15);

        let two = wave_propagate(&wave_propagate(&state, 0.7), 1.1);
        let one = wave_propagate(&state, 1.8);
        let (a2, b2) = forward_pair(&two.w, &two.w_t);
        let (a1, b1) = forward_pair(&one.w, &one.w_t);
        assert!(max_abs_diff(a2.coeffs(), a1.coeffs()) < 1e-12);
        assert!(max_abs_diff(b2.coeffs(), b1.coeffs()) < 1e-12);
    }

    #[test]
    fn derivative_of_sine_series() {
        let g = grid();
        let f = RadialField::from_fn(&g, |r| r * (-(r * r)).exp()).unwrap();
        let hat = forward(&f);
        let (d, _) = radial_derivative_pair(&hat, &hat);
        for (r, dv) in g.nodes().iter().zip(&d) {
            let exact = (1.0 - 2.0 * r * r) * (-(r * r)).exp();
            assert!((dv - exact).abs() < 1e-9, "r={r}");
        }
        let (left, right) = boundary_derivative(&hat);
        assert!((left - 1.0).abs() < 1e-9 && right.abs() < 1e-9);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn plancherel_and_energy(vals in proptest::collection::vec(-1.0f64..1.0, 127),
                                     vel in proptest::collection::vec(-1.0f64..1.0, 127),
                                     t in -5.0f64..5.0) {
                let g = RadialGrid::new(9.0, 128).unwrap();
                let f = RadialField::from_values(&g, vals).unwrap();
                let v = RadialField::from_values(&g, vel).unwrap();
                let (a, b) = forward_pair(&f, &v);
                let direct = g.dr() * f.values().iter().map(|x| x * x).sum::<f64>();
                prop_assert!((a.norm_sq() - direct).abs() <= 1e-12 * direct);
                let e0 = quadratic_energy(&a, &b);
                let (mut a2, mut b2) = (a.clone(), b.clone());
                rotate(&mut a2, &mut b2, t);
                prop_assert!((quadratic_energy(&a2, &b2) - e0).abs() <= 1e-13 * e0);
            }
        }
    }
}
