//! Measurements behind the self-test and the acceptance suite.

use h3wave::morawetz::MorawetzWeight;
use h3wave::norms::sobolev_norm;
use h3wave::projections::{bernstein_report_spectral, single_mode_low_ratio};
use h3wave::spectral::{self, apply_multiplier, quadratic_energy, wave_propagate, HeatComplement, Heat, LaplacianPower, SpectralField};
use h3wave::synth::field_corpus;
use h3wave::{GridRef, RadialField, WaveState};

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest `max|f - T⁻¹Tf| / max|f|` over the fields.
pub fn roundtrip_error(fields: &[RadialField]) -> f64 {
    fields
        .iter()
        .map(|f| {
            let back = spectral::inverse(&spectral::forward(f));
            let diff: Vec<f64> = f.values().iter().zip(back.values()).map(|(a, b)| a - b).collect();
            max_abs(&diff) / max_abs(f.values())
        })
        .fold(0.0, f64::max)
}

/// Largest relative gap between `Σ ŵ_k²` and `dr Σ w_i²`.
pub fn plancherel_error(fields: &[RadialField]) -> f64 {
    fields
        .iter()
        .map(|f| {
            let direct = f.grid().dr() * f.values().iter().map(|x| x * x).sum::<f64>();
            (spectral::forward(f).norm_sq() - direct).abs() / direct
        })
        .fold(0.0, f64::max)
}

/// Largest relative coefficient error of `(-Δ)^{-1/2}(-Δ)^{1/2}` and of
/// `P_{≥s} + P_{<s}`.
pub fn multiplier_roundtrip_error(fields: &[RadialField], s: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for f in fields {
        let hat = spectral::forward(f);
        let scale = max_abs(hat.coeffs());
        let up = apply_multiplier(&hat, &LaplacianPower(1.0)).expect("finite symbol");
        let back = apply_multiplier(&up, &LaplacianPower(-1.0)).expect("finite symbol");
        let hi = apply_multiplier(&hat, &HeatComplement(s)).expect("finite symbol");
        let lo = apply_multiplier(&hat, &Heat(s)).expect("finite symbol");
        for k in 0..hat.coeffs().len() {
            let c = hat.coeffs()[k];
            worst = worst.max((back.coeffs()[k] - c).abs() / scale);
            worst = worst.max((hi.coeffs()[k] + lo.coeffs()[k] - c).abs() / scale);
        }
    }
    worst
}

pub struct PoincareRow {
    pub field: usize,
    pub sigma: f64,
    pub norm: f64,
}

/// Counts pairs `σ_a < σ_b` with `‖f‖_{H^{σ_a}} > (1 + tol) ‖f‖_{H^{σ_b}}`.
pub fn poincare(fields: &[RadialField], sigmas: &[f64], tol: f64) -> (usize, Vec<PoincareRow>) {
    let mut sorted = sigmas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut violations = 0;
    for (i, f) in fields.iter().enumerate() {
        let norms: Vec<f64> = sorted.iter().map(|&s| sobolev_norm(f, s)).collect();
        for a in 0..norms.len() {
            for b in a + 1..norms.len() {
                if norms[a] > norms[b] * (1.0 + tol) {
                    violations += 1;
                }
            }
        }
        rows.extend(sorted.iter().zip(&norms).map(|(&sigma, &norm)| PoincareRow { field: i, sigma, norm }));
    }
    (violations, rows)
}

/// `2^{-2}, …, 2^{-16}`.
pub fn bernstein_scales() -> Vec<f64> {
    (2..=16).map(|j| 2f64.powi(-j)).collect()
}

/// Largest closed-form single-mode ratios `(1 - e^{-x})/√x` and `√x e^{-x}`
/// over every mode and scale, with `x = s(λ²+1)`.
pub fn bernstein_mode_max(grid: &GridRef, scales: &[f64]) -> (f64, f64) {
    let mut low: f64 = 0.0;
    let mut high: f64 = 0.0;
    for &s in scales {
        for &mu in grid.laplacian_symbol() {
            let x = s * mu;
            low = low.max(single_mode_low_ratio(x));
            high = high.max(x.sqrt() * (-x).exp());
        }
    }
    (low, high)
}

/// Largest gap between the report for a unit mode and the closed form, over
/// every `stride`-th mode.
pub fn bernstein_mode_consistency(grid: &GridRef, scales: &[f64], stride: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in (1..=grid.len()).step_by(stride.max(1)) {
        let mode = SpectralField::unit_mode(grid, k).expect("mode in range");
        let mu = grid.laplacian_symbol()[k - 1];
        for row in bernstein_report_spectral(&mode, scales).expect("valid scales") {
            let x = row.s * mu;
            worst = worst.max((row.ratio_low - single_mode_low_ratio(x)).abs());
            worst = worst.max((row.ratio_grad_high - x.sqrt() * (-x).exp()).abs());
        }
    }
    worst
}

pub struct BernsteinCorpusRow {
    pub s: f64,
    pub ratio_low: f64,
    pub ratio_grad_high: f64,
    pub ratio_grad_band: f64,
}

/// The mixed corpus plus unit modes at `k ≈ 2^{j/2}`.
pub fn bernstein_corpus(grid: &GridRef, seed: u64) -> Vec<RadialField> {
    let mut fields = field_corpus(grid, 50, seed).expect("corpus on a valid grid");
    let mut k_prev = 0;
    for j in 0.. {
        let k = 2f64.powf(j as f64 / 2.0).round() as usize;
        if k > grid.len() {
            break;
        }
        if k != k_prev {
            fields.push(spectral::inverse(&SpectralField::unit_mode(grid, k).expect("mode in range")));
            k_prev = k;
        }
    }
    fields
}

/// Corpus-wide maxima of the Bernstein ratios at each scale.
pub fn bernstein_corpus_max(fields: &[RadialField], scales: &[f64]) -> Vec<BernsteinCorpusRow> {
    let mut rows: Vec<BernsteinCorpusRow> = scales
        .iter()
        .map(|&s| BernsteinCorpusRow { s, ratio_low: 0.0, ratio_grad_high: 0.0, ratio_grad_band: 0.0 })
        .collect();
    for f in fields {
        let hat = spectral::forward(f);
        for (acc, r) in rows.iter_mut().zip(bernstein_report_spectral(&hat, scales).expect("valid scales")) {
            acc.ratio_low = acc.ratio_low.max(r.ratio_low);
            acc.ratio_grad_high = acc.ratio_grad_high.max(r.ratio_grad_high);
            acc.ratio_grad_band = acc.ratio_grad_band.max(r.ratio_grad_band);
        }
    }
    rows
}

/// Every run of `window` consecutive values fits in `[c(1-rel), c(1+rel)]` for some `c`.
pub fn window_stable(values: &[f64], window: usize, rel: f64) -> bool {
    values.windows(window.max(1)).all(|w| {
        let hi = w.iter().cloned().fold(f64::MIN, f64::max);
        let lo = w.iter().cloned().fold(f64::MAX, f64::min);
        lo > 0.0 && hi / lo <= (1.0 + rel) / (1.0 - rel)
    })
}

/// Largest one-step relative change of the quadratic energy under `steps`
/// applications of the free propagator.
pub fn propagator_energy_step(state: &WaveState, dt: f64, steps: usize) -> f64 {
    let energy = |s: &WaveState| {
        let (a, b) = spectral::forward_pair(&s.w, &s.w_t);
        quadratic_energy(&a, &b)
    };
    let e0 = energy(state);
    let mut current = state.clone();
    let mut prev = e0;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        current = wave_propagate(&current, dt);
        let e = energy(&current);
        worst = worst.max((e - prev).abs() / e0);
        prev = e;
    }
    worst
}

/// `‖S(dt)^m u - S(m dt) u‖ / ‖S(m dt) u‖` in `L² × L²` of the weighted fields.
pub fn group_law_error(state: &WaveState, dt: f64, steps: usize) -> f64 {
    let mut composed = state.clone();
    for _ in 0..steps {
        composed = wave_propagate(&composed, dt);
    }
    let direct = wave_propagate(state, dt * steps as f64);
    let diff = composed.sub(&direct).expect("same grid");
    ((diff.w.l2_norm_sq() + diff.w_t.l2_norm_sq()) / (direct.w.l2_norm_sq() + direct.w_t.l2_norm_sq())).sqrt()
}

/// `max |Δa - 1|` over the nodes.
pub fn weight_residual(grid: &GridRef) -> f64 {
    max_abs(&MorawetzWeight::build(grid).laplacian_residual())
}

/// Smallest radial Hessian eigenvalue proxy `min(a'', a' coth r)`.
pub fn weight_hessian_min(grid: &GridRef) -> f64 {
    MorawetzWeight::build(grid)
        .hessian_eigenvalues()
        .fold(f64::INFINITY, |m, (a, b)| m.min(a).min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use h3wave::RadialGrid;

    #[test]
    fn window_stability() {
        assert!(window_stable(&[1.0, 1.1, 1.2, 1.0, 1.05], 4, 0.1));
        assert!(!window_stable(&[1.0, 1.0, 1.0, 1.3], 4, 0.1));
        assert!(!window_stable(&[0.0, 1.0], 2, 0.1));
    }

    #[test]
    fn small_grid_checks() {
        let g = RadialGrid::new(20.0, 256).unwrap();
        let corpus = field_corpus(&g, 12, 1).unwrap();
        assert!(roundtrip_error(&corpus) < 1e-12);
        assert!(plancherel_error(&corpus) < 1e-12);
        assert!(multiplier_roundtrip_error(&corpus, 1e-3) < 1e-13);
        let (v, rows) = poincare(&corpus, &[1.0, 0.0, -1.0], 1e-12);
        assert_eq!((v, rows.len()), (0, 36));
        let (low, high) = bernstein_mode_max(&g, &bernstein_scales());
        assert!(low <= 1.0 && high <= 1.0);
        assert!(bernstein_mode_consistency(&g, &bernstein_scales(), 17) < 1e-12);
    }
}
