use serde::Serialize;

use super::fit::{FitModel, LinearFit, ScalingFit};
use crate::noise_field::{build_gauge_data, check_resolution, GaugeData, MollifierSpec, NoiseRealization};
use crate::{Error, Result};

/// Norms of the gauge objects at one ε.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticRow {
    pub epsilon: f64,
    pub c_eps: f64,
    pub y_sup: f64,
    /// `‖Y_ε − Y‖_{L∞}` against the un-mollified field on the same grid.
    pub y_dist_to_limit: f64,
    /// `‖∇Y_ε‖_{L^p}` for each `p` of the report.
    pub grad_lp: Vec<f64>,
    /// `‖:|∇Y_ε|²:‖_{L^p}` for each `p` of the report.
    pub wick_lp: Vec<f64>,
    pub grad_l2_squared: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticReport {
    /// Seeds the rows were computed (or averaged) from.
    pub seeds: Vec<u64>,
    pub n: usize,
    pub p_list: Vec<f64>,
    pub rows: Vec<StochasticRow>,
    pub y_sup_limit: f64,
    pub y_fit: ScalingFit,
    pub grad_fits: Vec<ScalingFit>,
    pub wick_fits: Vec<ScalingFit>,
    /// `C_ε` against `log(1/ε)`.
    pub c_fit: LinearFit,
}

fn real_lp(values: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    if p.is_infinite() {
        return values.map(f64::abs).fold(0.0, f64::max);
    }
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v.abs().powf(p), c + 1));
    (sum / count as f64).powf(1.0 / p)
}

fn gauge_row(g: &GaugeData, limit: &GaugeData, p_list: &[f64]) -> StochasticRow {
    let grad_abs2 = || {
        g.grad_y[0]
            .values()
            .iter()
            .zip(g.grad_y[1].values())
            .map(|(a, b)| a.re * a.re + b.re * b.re)
    };
    let wick = || g.wick.values().iter().map(|z| z.re);
    let y_dist = g
        .y
        .values()
        .iter()
        .zip(limit.y.values())
        .map(|(a, b)| (a.re - b.re).abs())
        .fold(0.0, f64::max);
    StochasticRow {
        epsilon: g.epsilon,
        c_eps: g.c_eps,
        y_sup: real_lp(g.y.values().iter().map(|z| z.re), f64::INFINITY),
        y_dist_to_limit: y_dist,
        grad_lp: p_list.iter().map(|&p| real_lp(grad_abs2().map(f64::sqrt), p)).collect(),
        wick_lp: p_list.iter().map(|&p| real_lp(wick(), p)).collect(),
        grad_l2_squared: grad_abs2().sum::<f64>() / (g.n() * g.n()) as f64,
    }
}

fn check_inputs(eps_grid: &[f64], p_list: &[f64], n: usize, enforce_resolution: bool) -> Result<()> {
    if eps_grid.len() < 2 {
        return Err(Error::invalid("ε-grid needs at least two values"));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("ε-grid must be strictly decreasing inside (0, 1)"));
    }
    if p_list.is_empty() || p_list.iter().any(|&p| !(p >= 1.0)) {
        return Err(Error::invalid("Lebesgue exponents must be ≥ 1"));
    }
    if enforce_resolution {
        for &e in eps_grid {
            check_resolution(e, n)?;
        }
    }
    Ok(())
}

/// `‖Y_ε‖_{L∞}`, `‖∇Y_ε‖_{L^p}` and `‖:|∇Y_ε|²:‖_{L^p}` across the ε-grid
/// for one realization, fitted against `1`, `|log ε|` and `|log ε|²`.
pub fn stochastic_bound_report(
    noise: &NoiseRealization,
    eps_grid: &[f64],
    p_list: &[f64],
    n: usize,
    enforce_resolution: bool,
) -> Result<StochasticReport> {
    check_inputs(eps_grid, p_list, n, enforce_resolution)?;
    let limit = build_gauge_data(noise, &MollifierSpec::identity(), n)?;
    let rows = eps_grid
        .iter()
        .map(|&e| Ok(gauge_row(&build_gauge_data(noise, &MollifierSpec::bump(e)?, n)?, &limit, p_list)))
        .collect::<Result<Vec<_>>>()?;
    let y_sup_limit = real_lp(limit.y.values().iter().map(|z| z.re), f64::INFINITY);
    assemble(vec![noise.seed], n, p_list, rows, y_sup_limit)
}

fn assemble(
    seeds: Vec<u64>,
    n: usize,
    p_list: &[f64],
    rows: Vec<StochasticRow>,
    y_sup_limit: f64,
) -> Result<StochasticReport> {
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let col = |f: &dyn Fn(&StochasticRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let y_fit = ScalingFit::fit(&eps, &col(&|r| r.y_sup), FitModel::Constant)?;
    let grad_fits = (0..p_list.len())
        .map(|k| ScalingFit::fit(&eps, &col(&|r| r.grad_lp[k]), FitModel::PolyLog))
        .collect::<Result<Vec<_>>>()?;
    let wick_fits = (0..p_list.len())
        .map(|k| ScalingFit::fit(&eps, &col(&|r| r.wick_lp[k]), FitModel::PolyLogSquared))
        .collect::<Result<Vec<_>>>()?;
    let log_inv: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let c_fit = LinearFit::fit(&log_inv, &col(&|r| r.c_eps))?;
    Ok(StochasticReport {
        seeds,
        n,
        p_list: p_list.to_vec(),
        rows,
        y_sup_limit,
        y_fit,
        grad_fits,
        wick_fits,
        c_fit,
    })
}

impl StochasticReport {
    /// Row-wise mean of reports over seeds (same grid, ε-grid and exponents),
    /// refitted.
    pub fn seed_average(reports: &[StochasticReport]) -> Result<StochasticReport> {
        let first = reports
            .first()
            .ok_or_else(|| Error::invalid("nothing to average"))?;
        let shape_ok = reports.iter().all(|r| {
            r.n == first.n
                && r.p_list == first.p_list
                && r.rows.len() == first.rows.len()
                && r.rows.iter().zip(&first.rows).all(|(a, b)| a.epsilon == b.epsilon)
        });
        if !shape_ok {
            return Err(Error::invalid("reports differ in grid, ε-grid or exponents"));
        }
        let m = reports.len() as f64;
        let mean = |f: &dyn Fn(&StochasticReport) -> f64| reports.iter().map(f).sum::<f64>() / m;
        let rows = (0..first.rows.len())
            .map(|i| StochasticRow {
                epsilon: first.rows[i].epsilon,
                c_eps: mean(&|r| r.rows[i].c_eps),
                y_sup: mean(&|r| r.rows[i].y_sup),
                y_dist_to_limit: mean(&|r| r.rows[i].y_dist_to_limit),
                grad_lp: (0..first.p_list.len()).map(|k| mean(&|r| r.rows[i].grad_lp[k])).collect(),
                wick_lp: (0..first.p_list.len()).map(|k| mean(&|r| r.rows[i].wick_lp[k])).collect(),
                grad_l2_squared: mean(&|r| r.rows[i].grad_l2_squared),
            })
            .collect();
        let seeds = reports.iter().flat_map(|r| r.seeds.iter().copied()).collect();
        assemble(seeds, first.n, &first.p_list, rows, mean(&|r| r.y_sup_limit))
    }
}
