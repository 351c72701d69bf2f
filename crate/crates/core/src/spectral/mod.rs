//! Discrete Fourier infrastructure on the N×N collocation grid of
//! 𝕋² = [0, 2π)², and the norms measured on it.
//!
//! Conventions: `û(n) = N⁻² Σ_j u(x_j) e^{-i n·x_j}`, so `{e^{i n·x}}` is
//! orthonormal for the normalized measure `(2π)⁻² dx` and Parseval reads
//! `Σ |û(n)|² = mean |u|²`.

mod fft;
mod field;
mod norms;
mod series;

pub use fft::Fft2;
pub use field::{wavenumber, GridField};
pub use norms::{
    bessel_potential, dyadic_levels, lp_block, lp_norm, sobolev_norm, spacetime_norm,
    spacetime_norm_frames, wsp_norm,
};
pub use series::TimeSeriesNorms;
