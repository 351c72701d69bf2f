use serde::Serialize;

use crate::dynamics::{Trajectory, Variable};
use crate::spectral::{sobolev_norm, spacetime_norm};
use crate::{Error, Result};

/// Frames needed for the time quadrature to be meaningful.
pub const MIN_FRAMES: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersiveReport {
    pub delta: f64,
    pub frames: usize,
    /// `‖v‖_{L⁴((0,T); W^{3/4−δ,4})}`.
    pub a_norm: f64,
    /// `‖v‖²_{L²((0,T); W^{1,4})}`.
    pub b_squared: f64,
    pub h2_sup: f64,
    /// `log A / log sup H²`, when `sup H² > 1`.
    pub exponent_a: Option<f64>,
    /// `log B² / log sup H²`, when `sup H² > 1`.
    pub exponent_b: Option<f64>,
}

pub fn dispersive_norm_report(traj: &Trajectory, delta: f64) -> Result<DispersiveReport> {
    if traj.variable != Variable::Gauged {
        return Err(Error::invalid("dispersive norms need a gauged trajectory"));
    }
    if traj.len() < MIN_FRAMES {
        return Err(Error::invalid(format!(
            "dispersive norms need ≥ {MIN_FRAMES} stored frames, got {}",
            traj.len()
        )));
    }
    if !(0.0..0.75).contains(&delta) {
        return Err(Error::invalid(format!("δ = {delta} outside [0, 3/4)")));
    }
    let a_norm = spacetime_norm(traj, 4.0, 4.0, 0.75 - delta)?;
    let b = spacetime_norm(traj, 2.0, 4.0, 1.0)?;
    let b_squared = b * b;
    let h2_sup = traj
        .frames
        .iter()
        .map(|v| sobolev_norm(v, 2.0))
        .fold(0.0, f64::max);
    let (exponent_a, exponent_b) = if h2_sup > 1.0 {
        let l = h2_sup.ln();
        (Some(a_norm.ln() / l), Some(b_squared.ln() / l))
    } else {
        (None, None)
    };
    Ok(DispersiveReport {
        delta,
        frames: traj.len(),
        a_norm,
        b_squared,
        h2_sup,
        exponent_a,
        exponent_b,
    })
}
