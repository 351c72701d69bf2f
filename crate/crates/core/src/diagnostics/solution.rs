use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{Trajectory, Variable};
use crate::noise_field::GaugeData;
use crate::spectral::{lp_norm, sobolev_norm, GridField};
use crate::{Error, Result};

/// Suprema over the stored frames of a gauged trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionBounds {
    pub epsilon: f64,
    pub delta: f64,
    pub h1_sup: f64,
    pub h1_plus_sup: f64,
    pub h2_sup: f64,
    /// `sup_t ‖e^{−Y_ε}Δv‖_{L²}`.
    pub weighted_laplacian_sup: f64,
    /// `h2_sup / (1 + weighted_laplacian_sup)`.
    pub ellreg_ratio: f64,
}

fn weighted_laplacian(v: &GridField, gauge: &GaugeData) -> f64 {
    let lap = v.apply_multiplier(|m1, m2| Complex64::new(-((m1 * m1 + m2 * m2) as f64), 0.0));
    let weighted = lap
        .values()
        .iter()
        .zip(gauge.exp_neg_y())
        .map(|(z, e)| z * *e)
        .collect();
    lp_norm(&GridField::new(v.n(), weighted).expect("same grid"), 2.0)
}

pub fn solution_bound_report(traj: &Trajectory, gauge: &GaugeData, delta: f64) -> Result<SolutionBounds> {
    if traj.variable != Variable::Gauged {
        return Err(Error::invalid("solution bounds need a gauged trajectory"));
    }
    if traj.config.n != gauge.n() {
        return Err(Error::invalid("trajectory and gauge live on different grids"));
    }
    let sup = |f: &dyn Fn(&GridField) -> f64| traj.frames.iter().map(f).fold(0.0, f64::max);
    let h2_sup = sup(&|v| sobolev_norm(v, 2.0));
    let weighted_laplacian_sup = sup(&|v| weighted_laplacian(v, gauge));
    Ok(SolutionBounds {
        epsilon: gauge.epsilon,
        delta,
        h1_sup: sup(&|v| sobolev_norm(v, 1.0)),
        h1_plus_sup: sup(&|v| sobolev_norm(v, 1.0 + delta)),
        h2_sup,
        weighted_laplacian_sup,
        ellreg_ratio: h2_sup / (1.0 + weighted_laplacian_sup),
    })
}
