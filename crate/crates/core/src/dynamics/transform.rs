use num_complex::Complex64;

use super::trajectory::NormContext;
use super::{Trajectory, Variable};
use crate::noise_field::GaugeData;
use crate::spectral::GridField;
use crate::{Error, Result};

/// Well-prepared datum `u_ε(0) = u₀ e^{Y − Y_ε}` for `u₀ = e^{−Y} w`, which
/// simplifies to `e^{−Y_ε} w`. Its gauge transform is `w` for every ε.
pub fn well_prepared_data(w: &GridField, limit: &GaugeData, mollified: &GaugeData) -> Result<GridField> {
    limit.check_grid(w)?;
    mollified.check_grid(w)?;
    Ok(GridField::new(
        w.n(),
        w.values()
            .iter()
            .zip(mollified.exp_neg_y())
            .map(|(z, e)| z * *e)
            .collect(),
    )
    .expect("grid checked"))
}

/// Frame-wise `v(t_k) = e^{iC_ε t_k} e^{Y_ε} u(t_k)`.
///
/// With this phase `v` solves the gauged equation with the Wick potential
/// `|∇Y_ε|² − C_ε`; the opposite phase would leave `|∇Y_ε|² + C_ε`.
pub fn gauge_transform(traj: &Trajectory, gauge: &GaugeData) -> Result<Trajectory> {
    if traj.variable != Variable::Physical {
        return Err(Error::invalid("gauge_transform expects a physical trajectory"));
    }
    if traj.config.n != gauge.n() {
        return Err(Error::invalid(format!(
            "trajectory on a {}-grid, gauge on a {}-grid",
            traj.config.n,
            gauge.n()
        )));
    }
    let frames = traj
        .times
        .iter()
        .zip(&traj.frames)
        .map(|(&t, u)| {
            let phase = Complex64::from_polar(1.0, gauge.c_eps * t);
            GridField::new(
                u.n(),
                u.values()
                    .iter()
                    .zip(gauge.exp_y())
                    .map(|(z, e)| z * *e * phase)
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    // assemble() reverses backward runs; the input is already in time order.
    let mut config = traj.config.clone();
    let backward = std::mem::replace(&mut config.backward, false);
    let mut out = Trajectory::assemble(
        config,
        traj.times.clone(),
        frames,
        Variable::Gauged,
        NormContext::Gauged { gauge },
    )?;
    out.config.backward = backward;
    Ok(out)
}
