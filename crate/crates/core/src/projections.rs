//! Heat-flow frequency projections.
//!
//! ```text
//! P_{≥s} f = e^{sΔ} f          (frequencies ≲ s^{-1/2})
//! P_{<s} f = f - P_{≥s} f
//! P_s f    = (-sΔ) e^{sΔ} f
//! ```
//!
//! The data split uses `hi = (I - e^{s₀Δ})` and `lo = e^{s₀Δ}` on both
//! components of a state, so `hi + lo` reproduces the state mode by mode.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::{RadialField, WaveState};
use crate::spectral::{self, check_scale, Heat, HeatBand, HeatComplement, SpectralField};

pub fn p_geq(f: &RadialField, s: f64) -> Result<RadialField> {
    spectral::heat_flow(f, s)
}

pub fn p_lt(f: &RadialField, s: f64) -> Result<RadialField> {
    check_scale(s)?;
    spectral::filter(f, &HeatComplement(s))
}

pub fn p_band(f: &RadialField, s: f64) -> Result<RadialField> {
    check_scale(s)?;
    spectral::filter(f, &HeatBand(s))
}

/// High/low frequency split of a state at scale `s0`.
#[derive(Debug, Clone)]
pub struct SplitData {
    pub hi: WaveState,
    pub lo: WaveState,
    pub s0: f64,
}

pub fn split_state(state: &WaveState, s0: f64) -> Result<SplitData> {
    check_scale(s0)?;
    if s0 == 0.0 {
        let hi = WaveState::zeros(state.grid(), state.t);
        return Ok(SplitData { hi, lo: state.clone(), s0 });
    }
    let (a, b) = spectral::forward_pair(&state.w, &state.w_t);
    let lo_a = spectral::apply_multiplier(&a, &Heat(s0))?;
    let lo_b = spectral::apply_multiplier(&b, &Heat(s0))?;
    let (lo_w, lo_wt) = spectral::inverse_pair(&lo_a, &lo_b);
    let lo = WaveState::new(lo_w, lo_wt, state.t)?;
    // hi is formed as the physical-space remainder so that hi + lo = state
    // holds sample by sample, not only up to transform roundoff
    let hi = state.sub(&lo)?;
    Ok(SplitData { hi, lo, s0 })
}

/// One row of a Bernstein report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernsteinRow {
    pub s: f64,
    /// `‖P_{<s} f‖₂ / (s^{1/2} ‖∇f‖₂)`.
    pub ratio_low: f64,
    /// `‖∇P_{≥s} f‖₂ / (s^{-1/2} ‖f‖₂)`.
    pub ratio_grad_high: f64,
    /// `‖∇P_s f‖₂ / (s^{-1/2} ‖f‖₂)`; reported only, its lower bound is not asserted.
    pub ratio_grad_band: f64,
}

/// L² Bernstein ratios, all norms evaluated through the symbol. The gradient
/// norm is `‖(-Δ)^{1/2} f‖₂`. A zero field yields an empty report.
pub fn bernstein_report(f: &RadialField, scales: &[f64]) -> Result<Vec<BernsteinRow>> {
    for &s in scales {
        check_scale(s)?;
    }
    let hat = spectral::forward(f);
    bernstein_report_spectral(&hat, scales)
}

pub fn bernstein_report_spectral(hat: &SpectralField, scales: &[f64]) -> Result<Vec<BernsteinRow>> {
    let mu = hat.grid().laplacian_symbol();
    let l2 = libm::sqrt(hat.norm_sq());
    let grad = libm::sqrt(hat.coeffs().iter().zip(mu).map(|(c, m)| m * c * c).sum::<f64>());
    if l2 == 0.0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        check_scale(s)?;
        if s == 0.0 {
            continue;
        }
        let (mut low, mut high, mut band) = (0.0, 0.0, 0.0);
        for (c, &m) in hat.coeffs().iter().zip(mu) {
            let x = s * m;
            let lo = -libm::expm1(-x);
            let h = libm::exp(-x);
            low += lo * lo * c * c;
            high += m * h * h * c * c;
            band += m * x * x * h * h * c * c;
        }
        let rs = libm::sqrt(s);
        rows.push(BernsteinRow {
            s,
            ratio_low: libm::sqrt(low) / (rs * grad),
            ratio_grad_high: libm::sqrt(high) * rs / l2,
            ratio_grad_band: libm::sqrt(band) * rs / l2,
        });
    }
    Ok(rows)
}

/// `(1 - e^{-x}) / √x`, the single-mode low-projection Bernstein ratio at `x = s(λ²+1)`.
pub fn single_mode_low_ratio(x: f64) -> f64 {
    -libm::expm1(-x) / libm::sqrt(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridRef, RadialGrid};
    use crate::spectral::{forward, forward_pair, inverse};

    fn grid() -> GridRef {
        RadialGrid::new(16.0, 256).unwrap()
    }

    fn bump(g: &GridRef) -> RadialField {
        RadialField::from_fn(g, |r| r * (-(r - 1.0).powi(2) * 3.0).exp() + 0.3 * (2.7 * r).sin() * (-r).exp())
            .unwrap()
    }

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn projections_at_zero_scale() {
        let g = grid();
        let f = bump(&g);
        let geq = p_geq(&f, 0.0).unwrap();
        assert!(f.sub(&geq).unwrap().values().iter().all(|v| v.abs() < 1e-14));
        assert!(max_abs(p_lt(&f, 0.0).unwrap().values()) < 1e-14);
        assert!(max_abs(p_band(&f, 0.0).unwrap().values()) == 0.0);
        assert!(p_geq(&f, -1.0).is_err() && p_lt(&f, -1.0).is_err() && p_band(&f, -1.0).is_err());
    }

    #[test]
    fn complementarity_and_mode_factors() {
        let g = grid();
        let f = bump(&g);
        for s in [1e-4, 0.01, 0.3, 4.0] {
            let sum = p_geq(&f, s).unwrap().add(&p_lt(&f, s).unwrap()).unwrap();
            let d = max_abs(sum.sub(&f).unwrap().values());
            assert!(d <= 1e-14 * max_abs(f.values()) * 10.0, "s={s} d={d}");
        }
        let k = 11;
        let mu = g.laplacian_symbol()[k - 1];
        let mode = inverse(&SpectralField::unit_mode(&g, k).unwrap());
        let s = 0.02;
        let geq = forward(&p_geq(&mode, s).unwrap()).coeffs()[k - 1];
        assert!((geq - (-s * mu).exp()).abs() < 1e-14);
        let s = 1.0 / mu;
        let band = forward(&p_band(&mode, s).unwrap()).coeffs()[k - 1];
        assert!((band - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn band_matches_composite_symbol() {
        let g = grid();
        let f = bump(&g);
        let s = 0.05;
        let direct = spectral::filter(&f, &|l: f64| {
            let x = s * (l * l + 1.0);
            x * (-x).exp()
        })
        .unwrap();
        let band = p_band(&f, s).unwrap();
        assert!(max_abs(band.sub(&direct).unwrap().values()) <= 1e-13 * max_abs(f.values()));
    }

    #[test]
    fn split_cases() {
        let g = grid();
        let state = WaveState::new(bump(&g), bump(&g).scaled(0.4), 0.0).unwrap();
        let zero = split_state(&state, 0.0).unwrap();
        assert!(max_abs(zero.hi.w.values()) < 1e-14 && max_abs(zero.hi.w_t.values()) < 1e-14);

        let split = split_state(&state, 0.01).unwrap();
        let back = split.hi.add(&split.lo).unwrap();
        let scale = max_abs(state.w.values());
        assert!(max_abs(back.sub(&state).unwrap().w.values()) <= 1e-13 * scale);
        assert!(max_abs(back.sub(&state).unwrap().w_t.values()) <= 1e-13 * scale);
        assert!(split_state(&state, -0.5).is_err());

        let k = 20;
        let mu = g.laplacian_symbol()[k - 1];
        let mode = inverse(&SpectralField::unit_mode(&g, k).unwrap());
        let ms = WaveState::new(mode.clone(), mode, 0.0).unwrap();
        let s0 = 0.004;
        let sp = split_state(&ms, s0).unwrap();
        let (a, b) = forward_pair(&sp.hi.w, &sp.hi.w_t);
        let frac = 1.0 - (-s0 * mu).exp();
        assert!((a.coeffs()[k - 1] - frac).abs() < 1e-13);
        assert!((b.coeffs()[k - 1] - frac).abs() < 1e-13);
    }

    #[test]
    fn bernstein_single_mode_closed_form() {
        let g = grid();
        let k = 6;
        let mu = g.laplacian_symbol()[k - 1];
        let mode = inverse(&SpectralField::unit_mode(&g, k).unwrap());
        let rows = bernstein_report(&mode, &[0.25, 0.01, 1e-4]).unwrap();
        assert_eq!(rows.len(), 3);
        for row in rows {
            let expect = (1.0 - (-row.s * mu).exp()) / (row.s.sqrt() * mu.sqrt());
            assert!((row.ratio_low - expect).abs() < 1e-12 * expect.max(1e-300));
            assert!(row.ratio_low <= 1.0 && row.ratio_grad_high <= 1.0);
        }
        assert!(bernstein_report(&RadialField::zeros(&g), &[0.1]).unwrap().is_empty());
    }

    #[test]
    fn per_mode_bernstein_bound_and_monotonicity() {
        let g = RadialGrid::new(40.0, 4096).unwrap();
        for &mu in g.laplacian_symbol() {
            let mut prev = 0.0;
            for j in 2..=16 {
                let s = 2f64.powi(-(17 - j + 1));
                let x = s * mu;
                let r = single_mode_low_ratio(x);
                assert!(r <= 1.0, "mu={mu} s={s}");
                let frac = -(-x).exp_m1();
                assert!(frac >= prev);
                prev = frac;
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn heat_projection_contracts(vals in proptest::collection::vec(-1.0f64..1.0, 63), s in 0.0f64..2.0) {
                let g = RadialGrid::new(8.0, 64).unwrap();
                let f = RadialField::from_values(&g, vals).unwrap();
                let p = p_geq(&f, s).unwrap();
                prop_assert!(p.l2_norm_sq().sqrt() <= f.l2_norm_sq().sqrt() * (1.0 + 1e-13));
            }
        }
    }
}
