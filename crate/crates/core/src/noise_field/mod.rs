//! Periodic white noise, its mollification, and the gauge objects built
//! from it: `Y_ε = Δ⁻¹ξ_ε`, `∇Y_ε`, the Wick square `:|∇Y_ε|²:` and the
//! renormalization constant `C_ε`.

mod gauge;
mod mollifier;
mod noise;
pub mod record;

pub use gauge::{
    build_gauge_data, build_gauge_data_on_lattice, grid_lattice_halfwidth, renormalization_constant,
    GaugeData,
};
pub use mollifier::{
    bump_transform, check_resolution, mollifier_symbol, MollifierKind, MollifierSpec, MIN_RESOLUTION,
};
pub use noise::{sample_noise, sample_noise_scaled, NoiseRealization};
