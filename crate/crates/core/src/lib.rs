//! Pseudo-spectral simulation of the defocusing nonlinear Schrödinger
//! equation on the two-torus with a mollified white-noise potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grid fields, 2D FFTs, Sobolev/Lebesgue/space-time norms
//!   and Littlewood–Paley blocks.
//! * [`noise_field`]: white-noise sampling, the mollifier symbol, the gauge
//!   potential `Y_ε`, its Wick-renormalized squared gradient and `C_ε`.
//! * [`dynamics`]: the split-step solver for the physical equation, the
//!   integrating-factor RK4 solver for the gauged equation, and the gauge
//!   transform between them.
//! * [`diagnostics`]: a-priori-bound measurements and their ε-scaling fits.
//! * [`experiments`]: ε-convergence and modulus-convergence studies, and
//!   Monte-Carlo sweeps over noise realizations.
//! * [`cli_io`]: configuration files, CSV/JSON output, manifests and the
//!   command implementations behind the `wicknls` binary.
//!
//! All randomness flows from a 64-bit seed; every run is deterministic.

pub mod cli_io;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod noise_field;
pub mod parallel;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
