//! Time integration of the physical equation
//! `i∂ₜu = Δu + ξ_ε u − u|u|^p` and of its gauged form
//! `i∂ₜv = H_ε v − e^{−pY_ε} v|v|^p`, plus the transform linking them.

mod config;
mod gauged;
mod observables;
mod physical;
mod trajectory;
mod transform;

pub use config::{Scheme, SolverConfig, BLOWUP_THRESHOLD};
pub use gauged::{apply_h_epsilon, linear_propagator, solve_gauged, GaugedOperator};
pub use observables::{physical_energy, weighted_mass};
pub use physical::solve_physical;
pub use trajectory::{Trajectory, Variable};
pub use transform::{gauge_transform, well_prepared_data};
