use super::convergence::{convergence_seed, dispersive_seed};
use super::plan::{StudyKind, StudyPlan};
use super::report::{Aggregate, CheckOutcome, SeedOutcome, SeedResult, Stats, StudyReport};
use crate::diagnostics::{stochastic_bound_report, strichartz_probe, StochasticReport};
use crate::noise_field::grid_lattice_halfwidth;
use crate::parallel::map_indexed;
use crate::{Error, Result};

fn outcome(seed: u64, result: Option<SeedResult>, failure: Option<String>) -> SeedOutcome {
    SeedOutcome {
        seed,
        result,
        failure,
    }
}

/// Runs the requested studies for one seed. The ε and modulus studies share
/// their solver runs when both are requested.
fn run_seed(plan: &StudyPlan, kinds: &[StudyKind], seed: u64) -> Vec<SeedOutcome> {
    let want_eps = kinds.contains(&StudyKind::Epsilon);
    let want_mod = kinds.contains(&StudyKind::Modulus);
    let conv = (want_eps || want_mod).then(|| convergence_seed(plan, seed, want_eps, want_mod));
    kinds
        .iter()
        .map(|kind| match kind {
            StudyKind::Epsilon => {
                let c = conv.as_ref().expect("computed above");
                outcome(seed, c.epsilon.clone().map(SeedResult::Epsilon), c.failure.clone())
            }
            StudyKind::Modulus => {
                let c = conv.as_ref().expect("computed above");
                outcome(seed, c.modulus.clone().map(SeedResult::Modulus), c.failure.clone())
            }
            StudyKind::Bounds => match bounds_seed(plan, seed) {
                Ok(r) => outcome(seed, Some(SeedResult::Bounds(r)), None),
                Err(e) => outcome(seed, None, Some(e.to_string())),
            },
            StudyKind::Strichartz => match strichartz_seed(plan, seed) {
                Ok(r) => outcome(seed, Some(SeedResult::Strichartz(r)), None),
                Err(e) => outcome(seed, None, Some(e.to_string())),
            },
            StudyKind::Dispersive => {
                let (r, failure) = dispersive_seed(plan, seed);
                outcome(seed, Some(SeedResult::Dispersive(r)), failure)
            }
        })
        .collect()
}

fn bounds_seed(plan: &StudyPlan, seed: u64) -> Result<StochasticReport> {
    let n = plan.bounds_grid();
    let noise = plan.noise_for(seed, grid_lattice_halfwidth(n))?;
    stochastic_bound_report(
        &noise,
        &plan.eps_grid,
        &plan.bounds.p_list,
        n,
        !plan.allow_underresolved_epsilon,
    )
}

fn strichartz_seed(plan: &StudyPlan, seed: u64) -> Result<crate::diagnostics::StrichartzReport> {
    let noise = plan.noise_for(seed, plan.dynamics_lattice())?;
    let gauges = plan
        .eps_grid
        .iter()
        .map(|&e| plan.gauge_for(&noise, e))
        .collect::<Result<Vec<_>>>()?;
    strichartz_probe(&gauges, &plan.probe)
}

fn check_study_preconditions(plan: &StudyPlan, kinds: &[StudyKind]) -> Result<()> {
    plan.validate()?;
    if kinds.contains(&StudyKind::Modulus) {
        if let Some(g) = plan.gamma_list.iter().find(|g| **g >= 1.0) {
            return Err(Error::invalid(format!(
                "the modulus study needs γ ∈ [0, 1), got {g}"
            )));
        }
    }
    if kinds.contains(&StudyKind::Strichartz) && plan.probe.bandlimit >= plan.solver.n / 2 {
        return Err(Error::invalid("probe bandlimit must stay below N/2"));
    }
    Ok(())
}

/// Runs several studies over the seeds `base_seed + i`, in parallel over
/// seeds. Per-seed failures are recorded, never fatal.
pub fn monte_carlo_sweep_many(plan: &StudyPlan, kinds: &[StudyKind]) -> Result<Vec<StudyReport>> {
    check_study_preconditions(plan, kinds)?;
    let seeds = plan.seeds();
    let per_seed = map_indexed(seeds.len(), |i| run_seed(plan, kinds, seeds[i]));
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            let outcomes = per_seed.iter().map(|o| o[k].clone()).collect();
            StudyReport::from_outcomes(plan, kind, outcomes)
        })
        .collect())
}

pub fn monte_carlo_sweep(plan: &StudyPlan, kind: StudyKind) -> Result<StudyReport> {
    Ok(monte_carlo_sweep_many(plan, &[kind])?.remove(0))
}

fn sequential_study(plan: &StudyPlan, kind: StudyKind) -> Result<StudyReport> {
    check_study_preconditions(plan, &[kind])?;
    let outcomes = plan
        .seeds()
        .into_iter()
        .map(|seed| run_seed(plan, &[kind], seed).remove(0))
        .collect();
    Ok(StudyReport::from_outcomes(plan, kind, outcomes))
}

/// ε-convergence study over the plan's seeds, one after another on the
/// calling thread.
pub fn epsilon_convergence_study(plan: &StudyPlan) -> Result<StudyReport> {
    sequential_study(plan, StudyKind::Epsilon)
}

/// Modulus study over the plan's seeds, on the calling thread.
pub fn modulus_convergence_study(plan: &StudyPlan) -> Result<StudyReport> {
    sequential_study(plan, StudyKind::Modulus)
}

/// The ε-convergence sweep repeated on several grids (the potential lattice
/// scales with each grid).
pub fn grid_sensitivity(plan: &StudyPlan, grids: &[usize]) -> Result<Vec<(usize, StudyReport)>> {
    grids
        .iter()
        .map(|&n| {
            let mut p = plan.clone();
            p.solver.n = n;
            p.noise.lattice = None;
            Ok((n, monte_carlo_sweep(&p, StudyKind::Epsilon)?))
        })
        .collect()
}

fn agg(out: &mut Vec<Aggregate>, quantity: &str, epsilon: Option<f64>, gamma: Option<f64>, values: &[f64]) {
    if let Some(stats) = Stats::of(values) {
        out.push(Aggregate {
            quantity: quantity.to_string(),
            epsilon,
            gamma,
            stats,
        });
    }
}

fn check(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
    }
}

impl StudyReport {
    /// Aggregates and checks from per-seed outcomes; the outcomes are sorted
    /// by seed first, so the report does not depend on their order.
    pub fn from_outcomes(plan: &StudyPlan, study: StudyKind, mut outcomes: Vec<SeedOutcome>) -> Self {
        outcomes.sort_by_key(|o| o.seed);
        let mut report = StudyReport {
            study,
            outcomes,
            aggregates: Vec::new(),
            averaged_bounds: None,
            checks: Vec::new(),
        };
        match study {
            StudyKind::Epsilon => report.finish_epsilon(plan),
            StudyKind::Modulus => report.finish_modulus(plan),
            StudyKind::Bounds => report.finish_bounds(plan),
            StudyKind::Strichartz => report.finish_strichartz(plan),
            StudyKind::Dispersive => report.finish_dispersive(plan),
        }
        report
    }

    fn seed_count(&self) -> usize {
        self.outcomes.len()
    }

    fn decrease_check(&mut self, plan: &StudyPlan, flags: Vec<(u64, Vec<bool>)>, label: &str) {
        let Some(gamma) = plan.checks.decreasing_gamma else {
            return;
        };
        let Some(j) = plan.gamma_list.iter().position(|&g| g == gamma) else {
            self.checks.push(check(
                &format!("{label}_decreasing"),
                false,
                format!("γ = {gamma} is not in gamma_list"),
            ));
            return;
        };
        let good = flags.iter().filter(|(_, f)| f[j]).count();
        let need = plan.checks.min_seed_fraction.unwrap_or(1.0);
        let total = self.seed_count();
        self.checks.push(check(
            &format!("{label}_decreasing"),
            good as f64 >= need * total as f64,
            format!("strictly decreasing at γ = {gamma} for {good} of {total} seeds (need fraction {need})"),
        ));
    }

    fn finish_epsilon(&mut self, plan: &StudyPlan) {
        let seeds: Vec<_> = self.epsilon_seeds().map(|(s, r)| (s, r.clone())).collect();
        for (i, &e) in plan.eps_grid.iter().enumerate() {
            for (j, &g) in plan.gamma_list.iter().enumerate() {
                let v: Vec<f64> = seeds
                    .iter()
                    .filter_map(|(_, r)| r.direct.get(i).map(|row| row[j]))
                    .collect();
                agg(&mut self.aggregates, "sup_diff", Some(e), Some(g), &v);
            }
        }
        for (j, &g) in plan.gamma_list.iter().enumerate() {
            let v: Vec<f64> = seeds
                .iter()
                .map(|(_, r)| if r.decreasing[j] { 1.0 } else { 0.0 })
                .collect();
            agg(&mut self.aggregates, "decreasing_indicator", None, Some(g), &v);
        }
        let flags = seeds.iter().map(|(s, r)| (*s, r.decreasing.clone())).collect();
        self.decrease_check(plan, flags, "epsilon");
        if let Some(tol) = plan.checks.initial_identity_tol {
            let worst = seeds
                .iter()
                .flat_map(|(_, r)| r.initial_identity.iter().copied())
                .fold(0.0, f64::max);
            let complete = seeds.len() == self.seed_count();
            self.checks.push(check(
                "initial_identity",
                complete && worst <= tol,
                format!("max ‖v_ε(0) − w‖_H² = {worst:.3e} (tolerance {tol:.0e})"),
            ));
        }
    }

    fn finish_modulus(&mut self, plan: &StudyPlan) {
        let seeds: Vec<_> = self.modulus_seeds().map(|(s, r)| (s, r.clone())).collect();
        for (i, &e) in plan.eps_grid.iter().enumerate() {
            for (j, &g) in plan.gamma_list.iter().enumerate() {
                let v: Vec<f64> = seeds
                    .iter()
                    .filter_map(|(_, r)| r.hgamma.get(i).map(|row| row[j]))
                    .collect();
                agg(&mut self.aggregates, "modulus_sup_diff", Some(e), Some(g), &v);
            }
            let v: Vec<f64> = seeds.iter().filter_map(|(_, r)| r.linf.get(i).copied()).collect();
            agg(&mut self.aggregates, "modulus_sup_linf", Some(e), None, &v);
        }
        let flags = seeds.iter().map(|(s, r)| (*s, r.decreasing.clone())).collect();
        self.decrease_check(plan, flags, "modulus");
        if let Some(tol) = plan.checks.anchor_tol {
            let mut worst = 0.0f64;
            for (_, r) in &seeds {
                for (a, b) in r.anchor_measured.iter().flatten().zip(r.anchor_analytic.iter().flatten()) {
                    worst = worst.max((a - b).abs());
                }
                for (a, b) in r.anchor_linf_measured.iter().zip(&r.anchor_linf_analytic) {
                    worst = worst.max((a - b).abs());
                }
            }
            let complete = seeds.len() == self.seed_count();
            self.checks.push(check(
                "modulus_anchor",
                complete && worst <= tol,
                format!("max |measured − analytic| at t = 0 is {worst:.3e} (tolerance {tol:.0e})"),
            ));
        }
    }

    fn finish_bounds(&mut self, plan: &StudyPlan) {
        let reports: Vec<StochasticReport> = self.bounds_seeds().map(|(_, r)| r.clone()).collect();
        for (i, &e) in plan.eps_grid.iter().enumerate() {
            let col = |f: &dyn Fn(&StochasticReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
            agg(&mut self.aggregates, "c_eps", Some(e), None, &col(&|r| r.rows[i].c_eps));
            agg(&mut self.aggregates, "y_sup", Some(e), None, &col(&|r| r.rows[i].y_sup));
            for (k, &p) in plan.bounds.p_list.iter().enumerate() {
                agg(&mut self.aggregates, &format!("grad_l{p}"), Some(e), None, &col(&|r| r.rows[i].grad_lp[k]));
                agg(&mut self.aggregates, &format!("wick_l{p}"), Some(e), None, &col(&|r| r.rows[i].wick_lp[k]));
            }
        }
        let complete = reports.len() == self.seed_count();
        self.averaged_bounds = StochasticReport::seed_average(&reports).ok();
        let Some(avg) = self.averaged_bounds.clone() else {
            if plan.checks != Default::default() {
                self.checks.push(check("bounds_available", false, "no seed completed".into()));
            }
            return;
        };
        let c = &plan.checks;
        if let Some(min) = c.c_fit_r2_min {
            self.checks.push(check(
                "c_eps_linear_fit",
                complete && avg.c_fit.r_squared > min,
                format!("r² = {:.6} (need > {min})", avg.c_fit.r_squared),
            ));
        }
        let band = |name: &str, fits: &[crate::diagnostics::ScalingFit], b: [f64; 2]| {
            let ok = fits.iter().all(|f| f.fitted_exponent >= b[0] && f.fitted_exponent <= b[1]);
            let got: Vec<String> = fits
                .iter()
                .zip(&plan.bounds.p_list)
                .map(|(f, p)| format!("p = {p}: {:.4}", f.fitted_exponent))
                .collect();
            check(name, complete && ok, format!("exponents {} (band [{}, {}])", got.join(", "), b[0], b[1]))
        };
        if let Some(b) = c.grad_exponent {
            self.checks.push(band("grad_exponent", &avg.grad_fits, b));
        }
        if let Some(b) = c.wick_exponent {
            self.checks.push(band("wick_exponent", &avg.wick_fits, b));
        }
        if let Some(min) = c.fit_r2_min {
            let worst = avg
                .grad_fits
                .iter()
                .chain(&avg.wick_fits)
                .map(|f| f.r_squared)
                .fold(1.0, f64::min);
            self.checks.push(check(
                "exponent_fit_r2",
                complete && worst > min,
                format!("smallest r² = {worst:.4} (need > {min})"),
            ));
        }
    }

    fn finish_strichartz(&mut self, plan: &StudyPlan) {
        let reports: Vec<_> = self.strichartz_seeds().map(|(_, r)| r.clone()).collect();
        for (i, &e) in plan.eps_grid.iter().enumerate() {
            let v: Vec<f64> = reports.iter().filter_map(|r| r.rows.get(i).map(|x| x.max_ratio)).collect();
            agg(&mut self.aggregates, "max_ratio", Some(e), None, &v);
        }
        let exps: Vec<f64> = reports
            .iter()
            .filter_map(|r| r.fit.as_ref().map(|f| f.fitted_exponent))
            .collect();
        agg(&mut self.aggregates, "log_exponent", None, None, &exps);
        if let Some(max) = plan.checks.strichartz_max_exponent {
            let finite = reports
                .iter()
                .all(|r| r.rows.iter().flat_map(|x| &x.ratios).all(|v| v.is_finite()));
            let complete = reports.len() == self.seed_count() && exps.len() == reports.len();
            let worst = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            self.checks.push(check(
                "strichartz_exponent",
                complete && finite && worst <= max,
                format!("ratios finite: {finite}; largest fitted exponent {worst:.4} (need ≤ {max})"),
            ));
        }
    }

    fn finish_dispersive(&mut self, plan: &StudyPlan) {
        let seeds: Vec<_> = self.dispersive_seeds().map(|(s, r)| (s, r.clone())).collect();
        for (i, &e) in plan.eps_grid.iter().enumerate() {
            let pick = |f: &dyn Fn(&super::convergence::DispersiveSeed) -> Option<f64>| {
                seeds.iter().filter_map(|(_, r)| f(r)).collect::<Vec<f64>>()
            };
            agg(&mut self.aggregates, "exponent_b", Some(e), None, &pick(&|r| r.dispersive.get(i).and_then(|d| d.exponent_b)));
            agg(&mut self.aggregates, "exponent_a", Some(e), None, &pick(&|r| r.dispersive.get(i).and_then(|d| d.exponent_a)));
            agg(&mut self.aggregates, "h2_sup", Some(e), None, &pick(&|r| r.bounds.get(i).map(|b| b.h2_sup)));
            agg(&mut self.aggregates, "h1_sup", Some(e), None, &pick(&|r| r.bounds.get(i).map(|b| b.h1_sup)));
            agg(&mut self.aggregates, "ellreg_ratio", Some(e), None, &pick(&|r| r.bounds.get(i).map(|b| b.ellreg_ratio)));
        }
        let fits: Vec<f64> = seeds
            .iter()
            .filter_map(|(_, r)| r.h2_fit.as_ref().map(|f| f.fitted_exponent))
            .collect();
        agg(&mut self.aggregates, "h2_log_exponent", None, None, &fits);
        if let Some(bmax) = plan.checks.dispersive_b_max {
            let expected = plan.eps_grid.len() * self.seed_count();
            let bs: Vec<Option<f64>> = seeds
                .iter()
                .flat_map(|(_, r)| r.dispersive.iter().map(|d| d.exponent_b))
                .collect();
            let worst = bs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
            let ok = bs.len() == expected && bs.iter().all(|b| matches!(b, Some(x) if *x < bmax));
            self.checks.push(check(
                "dispersive_b",
                ok,
                format!("{} of {expected} exponents defined; largest b = {worst:.4} (need < {bmax})", bs.iter().flatten().count()),
            ));
        }
    }
}
