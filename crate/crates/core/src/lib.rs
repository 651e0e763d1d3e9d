//! Spectral simulation of the radial cubic defocusing wave equation
//!
//! ```text
//! u_tt - Δ u + u³ = 0    on ℍ³
//! ```
//!
//! For radial data the weighted amplitude `w = sinh(r)·u` satisfies the
//! one-dimensional equation `w_tt - w_rr + w + w³/sinh²r = 0` on the half line,
//! so the Laplace–Beltrami operator is diagonalized by a sine transform with
//! symbol `λ² + 1`. Everything in this crate is built on that identification:
//!
//! * [`grid`]: the truncated radial domain, the volume measure and the
//!   weighted field representation.
//! * [`spectral`]: sine-transform calculus, spectral multipliers, the heat
//!   semigroup and the exact linear wave propagator.
//! * [`projections`]: heat-flow frequency projections and the high/low data split.
//! * [`norms`]: Lebesgue, Sobolev and space-time norms and the conserved energy.
//! * [`evolve`]: Strang-split time stepping of the free, cubic and forced equations.
//! * [`truncation`]: the Fourier truncation scheme with its interval ledger.
//! * [`morawetz`]: the Morawetz weight, potential and inequality monitor.
//! * [`synth`]: deterministic initial data of prescribed regularity.
//! * [`scatter`] and [`threshold`]: scattering and exponent diagnostics.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod dst;
pub mod error;
pub mod evolve;
pub mod fit;
pub mod grid;
pub mod morawetz;
pub mod norms;
pub mod projections;
pub mod scatter;
pub mod spectral;
pub mod synth;
pub mod threshold;
pub mod truncation;

pub use error::{Error, Result};
pub use grid::{GridRef, RadialField, RadialGrid, WaveState};
pub use spectral::SpectralField;
