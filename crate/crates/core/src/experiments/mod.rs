//! Monte Carlo studies over noise seeds.

mod convergence;
mod plan;
mod report;
mod sweep;

pub use convergence::{
    DispersiveSeed, EpsilonSeed, ModulusSeed, ReferenceMeta,
};
pub use plan::{
    BoundsSection, DatumSpec, ModeSpec, NoiseSection, PlanChecks, SolverSection, StudyKind, StudyPlan,
};
pub use report::{Aggregate, Cell, CheckOutcome, SeedOutcome, SeedResult, Stats, StudyReport, Table};
pub use sweep::{
    epsilon_convergence_study, grid_sensitivity, modulus_convergence_study, monte_carlo_sweep,
    monte_carlo_sweep_many,
};
