//! Measurements of the quantities bounded by the a-priori estimates, and
//! least-squares fits of their dependence on ε.

mod dispersive;
mod fit;
mod solution;
mod stochastic;
mod strichartz;

pub use dispersive::{dispersive_norm_report, DispersiveReport};
pub use fit::{h2_growth_fit, FitModel, LinearFit, ScalingFit};
pub use solution::{solution_bound_report, SolutionBounds};
pub use stochastic::{stochastic_bound_report, StochasticReport, StochasticRow};
pub use strichartz::{
    random_profile_datum, strichartz_probe, strichartz_ratio, StrichartzParams, StrichartzReport,
    StrichartzRow,
};

/// Default width of the small offsets written `s⁺`/`s⁻` (e.g. `H^{1+δ}`).
pub const DEFAULT_DELTA: f64 = 0.05;
