use num_complex::Complex64;
use serde::Serialize;

use super::plan::StudyPlan;
use crate::diagnostics::{
    dispersive_norm_report, h2_growth_fit, solution_bound_report, DispersiveReport, ScalingFit,
    SolutionBounds, DEFAULT_DELTA,
};
use crate::dynamics::{
    gauge_transform, solve_gauged, solve_physical, well_prepared_data, Scheme, Trajectory,
};
use crate::noise_field::{GaugeData, NoiseRealization};
use crate::spectral::{sobolev_norm, GridField};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceMeta {
    pub c_eps: f64,
    pub y_sup: f64,
    pub frames: usize,
    pub h2_sup: f64,
    /// Largest relative change of `⟨e^{−2Y}|v|²⟩` over the stored frames.
    pub weighted_mass_drift: f64,
}

/// Sup-in-time distances to the `ε = 0` reference, per `(ε, γ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonSeed {
    /// The ε values actually completed (a prefix of the plan's grid).
    pub epsilons: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `D(ε_i, γ_j) = max_k ‖v_{ε_i}(t_k) − v(t_k)‖_{H^{γ_j}}`.
    pub direct: Vec<Vec<f64>>,
    /// `max_k ‖v_{ε_i}(t_k) − v_{ε_{i+1}}(t_k)‖_{H^{γ_j}}`.
    pub cauchy: Vec<Vec<f64>>,
    /// `‖v_ε(0) − w‖_{H²}`.
    pub initial_identity: Vec<f64>,
    pub reference: ReferenceMeta,
    /// Per γ: `D(·, γ)` strictly decreasing over the full ε-grid.
    pub decreasing: Vec<bool>,
}

/// Sup-in-time norms of `|u_ε| − e^{−Y}|v|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusSeed {
    pub epsilons: Vec<f64>,
    pub gammas: Vec<f64>,
    pub hgamma: Vec<Vec<f64>>,
    pub linf: Vec<f64>,
    /// The `t = 0` difference taken from the runs.
    pub anchor_measured: Vec<Vec<f64>>,
    /// `‖(e^{−Y_ε} − e^{−Y})|w|‖` evaluated without any solve.
    pub anchor_analytic: Vec<Vec<f64>>,
    pub anchor_linf_measured: Vec<f64>,
    pub anchor_linf_analytic: Vec<f64>,
    pub decreasing: Vec<bool>,
    pub linf_decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersiveSeed {
    pub epsilons: Vec<f64>,
    pub dispersive: Vec<DispersiveReport>,
    pub bounds: Vec<SolutionBounds>,
    /// `sup_t ‖v_ε‖_{H²}` against `|log ε|`, when at least four ε completed.
    pub h2_fit: Option<ScalingFit>,
    /// `b` is non-increasing as ε decreases.
    pub b_nonincreasing: bool,
}

pub(crate) fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn real_field(n: usize, values: impl Iterator<Item = f64>) -> GridField {
    GridField::new(n, values.map(|x| Complex64::new(x, 0.0)).collect()).expect("grid values")
}

fn sup_frames<'a>(
    a: &'a [GridField],
    b: &'a [GridField],
    gammas: &[f64],
) -> Result<Vec<f64>> {
    let mut out = vec![0.0f64; gammas.len()];
    for (x, y) in a.iter().zip(b) {
        let d = x.sub(y)?;
        for (o, &g) in out.iter_mut().zip(gammas) {
            *o = o.max(sobolev_norm(&d, g));
        }
    }
    Ok(out)
}

fn reference_meta(reference: &Trajectory, limit: &GaugeData) -> ReferenceMeta {
    let mass = reference.norms.series("mass").unwrap_or(&[]);
    let m0 = mass.first().copied().unwrap_or(0.0);
    let drift = if m0 > 0.0 {
        mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0
    } else {
        0.0
    };
    ReferenceMeta {
        c_eps: limit.c_eps,
        y_sup: limit.y.max_abs(),
        frames: reference.len(),
        h2_sup: reference
            .frames
            .iter()
            .map(|v| sobolev_norm(v, 2.0))
            .fold(0.0, f64::max),
        weighted_mass_drift: drift,
    }
}

/// Both convergence studies for one seed from a single set of runs.
pub(crate) struct ConvergenceOutput {
    pub epsilon: Option<EpsilonSeed>,
    pub modulus: Option<ModulusSeed>,
    pub failure: Option<String>,
}

/// Solves the physical equation from well-prepared data and maps the
/// trajectory to the gauged variable.
fn physical_route(
    plan: &StudyPlan,
    w: &GridField,
    limit: &GaugeData,
    gauge: &GaugeData,
) -> Result<(Trajectory, Trajectory)> {
    let cfg = plan.solver_config(Scheme::StrangPhysical);
    let u0 = well_prepared_data(w, limit, gauge)?;
    let u = solve_physical(&u0, &cfg, &gauge.xi)?;
    let v = gauge_transform(&u, gauge)?;
    Ok((u, v))
}

pub(crate) fn convergence_seed(
    plan: &StudyPlan,
    seed: u64,
    want_epsilon: bool,
    want_modulus: bool,
) -> ConvergenceOutput {
    let mut out = ConvergenceOutput {
        epsilon: None,
        modulus: None,
        failure: None,
    };
    let n = plan.solver.n;
    let setup = (|| -> Result<_> {
        let noise = plan.noise_for(seed, plan.dynamics_lattice())?;
        let limit = plan.gauge_for(&noise, 0.0)?;
        let w = plan.datum.to_field(n)?;
        let reference = solve_gauged(&w, &plan.solver_config(Scheme::Rk4Gauged), &limit)?;
        Ok((noise, limit, w, reference))
    })();
    let (noise, limit, w, reference) = match setup {
        Ok(s) => s,
        Err(e) => {
            out.failure = Some(format!("reference run: {e}"));
            return out;
        }
    };
    let gammas = plan.gamma_list.clone();
    let mut eps_rec = EpsilonSeed {
        epsilons: Vec::new(),
        gammas: gammas.clone(),
        direct: Vec::new(),
        cauchy: Vec::new(),
        initial_identity: Vec::new(),
        reference: reference_meta(&reference, &limit),
        decreasing: vec![false; gammas.len()],
    };
    let mut mod_rec = ModulusSeed {
        epsilons: Vec::new(),
        gammas: gammas.clone(),
        hgamma: Vec::new(),
        linf: Vec::new(),
        anchor_measured: Vec::new(),
        anchor_analytic: Vec::new(),
        anchor_linf_measured: Vec::new(),
        anchor_linf_analytic: Vec::new(),
        decreasing: vec![false; gammas.len()],
        linf_decreasing: false,
    };
    // e^{−Y}|v(t_k)| for the limit, shared by every ε.
    let weighted_ref: Vec<GridField> = if want_modulus {
        reference
            .frames
            .iter()
            .map(|v| real_field(n, v.values().iter().zip(limit.exp_neg_y()).map(|(z, e)| z.norm() * e)))
            .collect()
    } else {
        Vec::new()
    };
    let mut previous: Option<Vec<GridField>> = None;
    for &eps in &plan.eps_grid {
        let step = (|| -> Result<(GaugeData, Trajectory, Trajectory)> {
            let gauge = plan.gauge_for(&noise, eps)?;
            let (u, v) = physical_route(plan, &w, &limit, &gauge)?;
            if v.len() != reference.len() {
                return Err(Error::invalid("physical and reference runs stored different frames"));
            }
            Ok((gauge, u, v))
        })();
        let (gauge, u, v) = match step {
            Ok(r) => r,
            Err(e) => {
                out.failure = Some(format!("ε = {eps}: {e}"));
                break;
            }
        };
        let res = (|| -> Result<()> {
            if want_epsilon {
                eps_rec.direct.push(sup_frames(&v.frames, &reference.frames, &gammas)?);
                eps_rec.initial_identity.push(sobolev_norm(&v.frames[0].sub(&w)?, 2.0));
                if let Some(prev) = &previous {
                    eps_rec.cauchy.push(sup_frames(prev, &v.frames, &gammas)?);
                }
                eps_rec.epsilons.push(eps);
            }
            if want_modulus {
                modulus_row(&mut mod_rec, eps, &u, &weighted_ref, &gauge, &limit, &w)?;
            }
            Ok(())
        })();
        if let Err(e) = res {
            out.failure = Some(format!("ε = {eps}: {e}"));
            break;
        }
        previous = Some(v.frames);
    }
    let complete = out.failure.is_none();
    if want_epsilon {
        for j in 0..gammas.len() {
            let col: Vec<f64> = eps_rec.direct.iter().map(|r| r[j]).collect();
            eps_rec.decreasing[j] = complete && strictly_decreasing(&col);
        }
        out.epsilon = Some(eps_rec);
    }
    if want_modulus {
        for j in 0..gammas.len() {
            let col: Vec<f64> = mod_rec.hgamma.iter().map(|r| r[j]).collect();
            mod_rec.decreasing[j] = complete && strictly_decreasing(&col);
        }
        mod_rec.linf_decreasing = complete && strictly_decreasing(&mod_rec.linf);
        out.modulus = Some(mod_rec);
    }
    out
}

fn modulus_row(
    rec: &mut ModulusSeed,
    eps: f64,
    u: &Trajectory,
    weighted_ref: &[GridField],
    gauge: &GaugeData,
    limit: &GaugeData,
    w: &GridField,
) -> Result<()> {
    let n = w.n();
    let mut sup = vec![0.0f64; rec.gammas.len()];
    let mut linf = 0.0f64;
    let mut first: Option<GridField> = None;
    for (uk, rk) in u.frames.iter().zip(weighted_ref) {
        let d = real_field(n, uk.values().iter().zip(rk.values()).map(|(a, b)| a.norm() - b.re));
        for (s, &g) in sup.iter_mut().zip(&rec.gammas) {
            *s = s.max(sobolev_norm(&d, g));
        }
        linf = linf.max(d.max_abs());
        if first.is_none() {
            first = Some(d);
        }
    }
    let first = first.ok_or_else(|| Error::invalid("empty trajectory"))?;
    // (e^{−Y_ε} − e^{−Y})|w| straight from the potentials.
    let analytic = real_field(
        n,
        gauge
            .y
            .values()
            .iter()
            .zip(limit.y.values())
            .zip(w.values())
            .map(|((ye, y), wv)| ((-ye.re).exp() - (-y.re).exp()) * wv.norm()),
    );
    rec.epsilons.push(eps);
    rec.hgamma.push(sup);
    rec.linf.push(linf);
    rec.anchor_measured
        .push(rec.gammas.iter().map(|&g| sobolev_norm(&first, g)).collect());
    rec.anchor_analytic
        .push(rec.gammas.iter().map(|&g| sobolev_norm(&analytic, g)).collect());
    rec.anchor_linf_measured.push(first.max_abs());
    rec.anchor_linf_analytic.push(analytic.max_abs());
    Ok(())
}

pub(crate) fn dispersive_seed(plan: &StudyPlan, seed: u64) -> (DispersiveSeed, Option<String>) {
    let mut rec = DispersiveSeed {
        epsilons: Vec::new(),
        dispersive: Vec::new(),
        bounds: Vec::new(),
        h2_fit: None,
        b_nonincreasing: false,
    };
    let setup = (|| -> Result<(NoiseRealization, GaugeData, GridField)> {
        let noise = plan.noise_for(seed, plan.dynamics_lattice())?;
        let limit = plan.gauge_for(&noise, 0.0)?;
        Ok((noise, limit, plan.datum.to_field(plan.solver.n)?))
    })();
    let (noise, limit, w) = match setup {
        Ok(s) => s,
        Err(e) => return (rec, Some(e.to_string())),
    };
    let mut failure = None;
    for &eps in &plan.eps_grid {
        let res = (|| -> Result<(DispersiveReport, SolutionBounds)> {
            let gauge = plan.gauge_for(&noise, eps)?;
            let (_, v) = physical_route(plan, &w, &limit, &gauge)?;
            Ok((
                dispersive_norm_report(&v, DEFAULT_DELTA)?,
                solution_bound_report(&v, &gauge, DEFAULT_DELTA)?,
            ))
        })();
        match res {
            Ok((d, b)) => {
                rec.epsilons.push(eps);
                rec.dispersive.push(d);
                rec.bounds.push(b);
            }
            Err(e) => {
                failure = Some(format!("ε = {eps}: {e}"));
                break;
            }
        }
    }
    if rec.epsilons.len() >= 4 {
        let sups: Vec<f64> = rec.bounds.iter().map(|b| b.h2_sup).collect();
        rec.h2_fit = h2_growth_fit(&rec.epsilons, &sups).ok();
    }
    let bs: Vec<Option<f64>> = rec.dispersive.iter().map(|d| d.exponent_b).collect();
    rec.b_nonincreasing = failure.is_none()
        && bs.iter().all(Option::is_some)
        && bs.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap());
    (rec, failure)
}
