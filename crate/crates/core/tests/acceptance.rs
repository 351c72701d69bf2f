//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! `cargo test --test acceptance -- 2 5` runs only criteria 2 and 5.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use wicknls::diagnostics::FitModel;
use wicknls::dynamics::{
    gauge_transform, solve_gauged, solve_physical, well_prepared_data, Scheme, SolverConfig,
};
use wicknls::experiments::{monte_carlo_sweep, PlanChecks, SolverSection, StudyKind, StudyPlan};
use wicknls::noise_field::{
    build_gauge_data, build_gauge_data_on_lattice, mollifier_symbol, renormalization_constant,
    sample_noise, sample_noise_scaled, GaugeData, MollifierSpec,
};
use wicknls::spectral::{wavenumber, GridField};
use wicknls::Complex64;

// Criterion 1
const RENORM_K1_EXACT: f64 = 6.0;
const RENORM_LATTICE: usize = 512;
const RENORM_EPS_POWERS: [i32; 5] = [3, 4, 5, 6, 7];
const RENORM_R2_MIN: f64 = 0.99;

// Criterion 2
const WICK_SEEDS: u64 = 200;
const WICK_EPS: f64 = 1.0 / 16.0;
const WICK_GRID: usize = 128;
const WICK_SIGMAS: f64 = 3.0;

// Criterion 3
const SCALING_SEEDS: usize = 8;
const SCALING_GRID: usize = 512;
const SCALING_EPS_POWERS: [i32; 4] = [3, 4, 5, 6];
const SCALING_P: f64 = 4.0;
const GRAD_EXPONENT: f64 = 1.0;
const WICK_EXPONENT: f64 = 2.0;
const EXPONENT_BAND: f64 = 0.35;
const SCALING_R2_MIN: f64 = 0.9;

// Criteria 4, 5: common run setup
const DYN_GRID: usize = 128;
const DYN_SIGMA: f64 = 0.1;
const DYN_EPS: f64 = 1.0 / 16.0;
const DYN_SEED: u64 = 1;

// Criterion 4. The mass clause fixes dt; the energy and weighted-mass
// clauses run at the step of the dynamics studies.
const CONS_DT: f64 = 1e-3;
const CONS_STUDY_DT: f64 = 2e-4;
const CONS_T: f64 = 1.0;
const CONS_P: f64 = 3.0;
const MASS_DRIFT_MAX: f64 = 1e-11;
const ENERGY_RATIO_BAND: [f64; 2] = [3.0, 5.0];
const WEIGHTED_MASS_DRIFT_MAX: f64 = 1e-6;

// Criterion 5
const TWO_INT_DT: f64 = 1e-4;
const TWO_INT_T: f64 = 0.5;
const TWO_INT_P: f64 = 3.0;
const TWO_INT_MAX: f64 = 1e-3;
const TWO_INT_HALVING_GAIN: f64 = 2.0;

// Criteria 6, 7, 8
const STUDY_SEEDS: usize = 8;
const STUDY_MIN_GOOD: usize = 7;
const STUDY_EPS_POWERS: [i32; 4] = [3, 4, 5, 6];
const STUDY_T: f64 = 0.5;
const STUDY_DT: f64 = 2e-4;
const CONV_P_LIST: [f64; 2] = [3.0, 6.0];
const CONV_GAMMA: f64 = 1.0;
const INITIAL_IDENTITY_TOL: f64 = 1e-12;
const MODULUS_P: f64 = 3.0;
const MODULUS_GAMMA: f64 = 0.5;
const ANCHOR_TOL: f64 = 1e-10;
const DISPERSIVE_B_MAX: f64 = 1.0;

// Criterion 9
const ZERO_GAUGE_TOL: f64 = 1e-8;
const STRICHARTZ_MAX_EXPONENT: f64 = 4.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn eps(power: i32) -> f64 {
    0.5f64.powi(power)
}

fn default_datum(n: usize) -> GridField {
    GridField::from_modes(
        n,
        &[((1, 0), Complex64::new(1.0, 0.0)), ((0, -1), Complex64::new(0.5, 0.0))],
    )
    .unwrap()
}

/// Least squares `y = a + b x`; returns `(b, r²)`.
fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

fn l2(f: &GridField) -> f64 {
    (f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.values().len() as f64).sqrt()
}

/// `(Σ (1+|n|²)^γ |f̂_n|²)^{1/2}` from the normalized coefficients.
fn h_gamma(f: &GridField, gamma: f64) -> f64 {
    let n = f.n();
    let c = f.coefficients();
    let mut s = 0.0;
    for k1 in 0..n {
        let m1 = wavenumber(k1, n) as f64;
        for k2 in 0..n {
            let m2 = wavenumber(k2, n) as f64;
            s += (1.0 + m1 * m1 + m2 * m2).powf(gamma) * c[k1 * n + k2].norm_sqr();
        }
    }
    s.sqrt()
}

fn max_rel_drift(series: &[f64]) -> f64 {
    series.iter().map(|v| (v - series[0]).abs()).fold(0.0, f64::max) / series[0].abs()
}

fn dynamics_gauge(epsilon: f64) -> (GaugeData, GaugeData) {
    let k = DYN_GRID / 4;
    let noise = sample_noise_scaled(DYN_SEED, k as i64, DYN_SIGMA).unwrap();
    let limit = build_gauge_data_on_lattice(&noise, &MollifierSpec::identity(), DYN_GRID, k).unwrap();
    let gauge = build_gauge_data_on_lattice(&noise, &MollifierSpec::bump(epsilon).unwrap(), DYN_GRID, k).unwrap();
    (limit, gauge)
}

fn study_plan(p: f64, gamma_list: Vec<f64>) -> StudyPlan {
    StudyPlan {
        base_seed: 1,
        sample_count: STUDY_SEEDS,
        eps_grid: STUDY_EPS_POWERS.iter().map(|&k| eps(k)).collect(),
        gamma_list,
        p,
        allow_underresolved_epsilon: true,
        solver: SolverSection {
            n: DYN_GRID,
            dt: STUDY_DT,
            t_final: STUDY_T,
            ..SolverSection::default()
        },
        ..StudyPlan::default()
    }
}

fn criterion_1() -> Outcome {
    let k1 = renormalization_constant(&MollifierSpec::identity(), 1);
    let mut detail = format!("C(χ̂ ≡ 1, K = 1) = {k1}");
    let mut passed = k1 == RENORM_K1_EXACT;

    let k = RENORM_LATTICE as i64;
    let mut x = Vec::new();
    let mut c = Vec::new();
    let mut worst_rel = 0.0f64;
    for &pw in &RENORM_EPS_POWERS {
        let e = eps(pw);
        let spec = MollifierSpec::bump(e).unwrap();
        let lib = renormalization_constant(&spec, RENORM_LATTICE);
        let mut direct = 0.0;
        for n1 in -k..=k {
            for n2 in -k..=k {
                if n1 == 0 && n2 == 0 {
                    continue;
                }
                let s = mollifier_symbol(&spec, (n1, n2));
                direct += s * s / (n1 * n1 + n2 * n2) as f64;
            }
        }
        worst_rel = worst_rel.max((lib - direct).abs() / direct);
        x.push((1.0 / e).ln());
        c.push(lib);
    }
    let (slope, r2) = ols(&x, &c);
    passed &= worst_rel <= 1e-12 && r2 > RENORM_R2_MIN;
    detail += &format!(
        "; K = {RENORM_LATTICE}: library vs direct sum rel. gap {worst_rel:.1e}, C_ε vs log(1/ε) slope {slope:.4}, r² = {r2:.6} (need > {RENORM_R2_MIN})"
    );
    outcome(passed, detail)
}

fn criterion_2() -> Outcome {
    let spec = MollifierSpec::bump(WICK_EPS).unwrap();
    let k = (WICK_GRID / 2 - 1) as i64;
    let mut means = Vec::new();
    let mut worst_gap = 0.0f64;
    for seed in 0..WICK_SEEDS {
        let noise = sample_noise(seed, k).unwrap();
        let g = build_gauge_data(&noise, &spec, WICK_GRID).unwrap();
        let mean = g.wick.values().iter().map(|z| z.re).sum::<f64>() / g.wick.values().len() as f64;
        // Parseval: ⟨|∇Y_ε|²⟩ = Σ χ̂(εn)² |g_n|² / |n|².
        let mut grad2 = 0.0;
        for n1 in -k..=k {
            for n2 in -k..=k {
                if n1 == 0 && n2 == 0 {
                    continue;
                }
                let s = mollifier_symbol(&spec, (n1, n2));
                grad2 += s * s * noise.g(n1, n2).norm_sqr() / (n1 * n1 + n2 * n2) as f64;
            }
        }
        worst_gap = worst_gap.max((mean - (grad2 - g.c_eps)).abs() / g.c_eps);
        means.push(mean);
    }
    let m = means.len() as f64;
    let avg = means.iter().sum::<f64>() / m;
    let std = (means.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let bound = WICK_SIGMAS * std / m.sqrt();
    outcome(
        avg.abs() <= bound && worst_gap <= 1e-10,
        format!(
            "M = {WICK_SEEDS}: seed-mean of ⟨:|∇Y_ε|²:⟩ = {avg:.4e}, bound 3·std/√M = {bound:.4e}; Parseval cross-check gap {worst_gap:.1e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let plan = StudyPlan {
        sample_count: SCALING_SEEDS,
        eps_grid: SCALING_EPS_POWERS.iter().map(|&k| eps(k)).collect(),
        solver: SolverSection {
            n: SCALING_GRID,
            ..SolverSection::default()
        },
        noise: Default::default(),
        bounds: wicknls::experiments::BoundsSection {
            p_list: vec![SCALING_P],
            n: Some(SCALING_GRID),
        },
        checks: PlanChecks {
            grad_exponent: Some([GRAD_EXPONENT - EXPONENT_BAND, GRAD_EXPONENT + EXPONENT_BAND]),
            wick_exponent: Some([WICK_EXPONENT - EXPONENT_BAND, WICK_EXPONENT + EXPONENT_BAND]),
            fit_r2_min: Some(SCALING_R2_MIN),
            ..PlanChecks::default()
        },
        ..StudyPlan::default()
    };
    let report = monte_carlo_sweep(&plan, StudyKind::Bounds).unwrap();
    let avg = report.averaged_bounds.as_ref().expect("every seed completed");
    let x: Vec<f64> = avg.rows.iter().map(|r| r.epsilon.ln().abs().ln()).collect();
    let grad: Vec<f64> = avg.rows.iter().map(|r| r.grad_lp[0].ln()).collect();
    let wick: Vec<f64> = avg.rows.iter().map(|r| r.wick_lp[0].ln()).collect();
    let (bg, rg) = ols(&x, &grad);
    let (bw, rw) = ols(&x, &wick);
    assert_eq!(avg.grad_fits[0].model, FitModel::PolyLog);
    let lib_agrees = (bg - avg.grad_fits[0].fitted_exponent).abs() < 1e-9
        && (bw - avg.wick_fits[0].fitted_exponent).abs() < 1e-9;
    let passed = (bg - GRAD_EXPONENT).abs() <= EXPONENT_BAND
        && (bw - WICK_EXPONENT).abs() <= EXPONENT_BAND
        && rg > SCALING_R2_MIN
        && rw > SCALING_R2_MIN;
    outcome(
        passed && lib_agrees && report.all_checks_pass(),
        format!(
            "M = {SCALING_SEEDS}, N = {SCALING_GRID}: ‖∇Y_ε‖_L4 exponent {bg:.3} (r² {rg:.4}, target {GRAD_EXPONENT} ± {EXPONENT_BAND}); ‖:|∇Y_ε|²:‖_L4 exponent {bw:.3} (r² {rw:.4}, target {WICK_EXPONENT} ± {EXPONENT_BAND})"
        ),
    )
}

/// `½⟨|∇u|²⟩ − ½⟨ξ|u|²⟩ + ⟨|u|^{p+2}⟩/(p+2)` with the gradient taken by
/// spectral differentiation.
fn energy_oracle(u: &GridField, xi: &GridField, p: f64) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let d1 = u.apply_multiplier(|m1, _| i * m1 as f64);
    let d2 = u.apply_multiplier(|_, m2| i * m2 as f64);
    let count = u.values().len() as f64;
    let mut pot = 0.0;
    let mut int = 0.0;
    for (z, x) in u.values().iter().zip(xi.values()) {
        pot += x.re * z.norm_sqr();
        int += z.norm().powf(p + 2.0);
    }
    0.5 * (l2(&d1).powi(2) + l2(&d2).powi(2)) - 0.5 * pot / count + int / count / (p + 2.0)
}

fn criterion_4() -> Outcome {
    let (limit, gauge) = dynamics_gauge(DYN_EPS);
    let w = default_datum(DYN_GRID);
    let u0 = well_prepared_data(&w, &limit, &gauge).unwrap();
    let run = |dt: f64| {
        let mut cfg = SolverConfig::new(DYN_GRID, dt, CONS_T, CONS_P, Scheme::StrangPhysical);
        cfg.store_stride = ((CONS_T / dt).round() as usize / 100).max(1);
        solve_physical(&u0, &cfg, &gauge.xi).unwrap()
    };
    let energy_drift = |t: &wicknls::dynamics::Trajectory| {
        let e: Vec<f64> = t.frames.iter().map(|f| energy_oracle(f, &gauge.xi, CONS_P)).collect();
        e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max)
    };
    let weighted_drift = |dt: f64| {
        let mut cfg = SolverConfig::new(DYN_GRID, dt, CONS_T, CONS_P, Scheme::Rk4Gauged);
        cfg.dealias = false;
        cfg.store_stride = ((CONS_T / dt).round() as usize / 100).max(1);
        let v = solve_gauged(&w, &cfg, &gauge).unwrap();
        let weighted: Vec<f64> = v
            .frames
            .iter()
            .map(|f| {
                f.values()
                    .iter()
                    .zip(gauge.y.values())
                    .map(|(z, y)| (-2.0 * y.re).exp() * z.norm_sqr())
                    .sum::<f64>()
            })
            .collect();
        max_rel_drift(&weighted)
    };

    let coarse = run(CONS_DT);
    let mass: Vec<f64> = coarse.frames.iter().map(|f| l2(f).powi(2)).collect();
    let mass_drift = max_rel_drift(&mass);
    let coarse_ratio = energy_drift(&coarse) / energy_drift(&run(CONS_DT / 2.0));
    let ratio = energy_drift(&run(CONS_STUDY_DT)) / energy_drift(&run(CONS_STUDY_DT / 2.0));
    let weighted = weighted_drift(CONS_STUDY_DT);
    let coarse_weighted = weighted_drift(CONS_DT);
    outcome(
        mass_drift <= MASS_DRIFT_MAX
            && (ENERGY_RATIO_BAND[0]..=ENERGY_RATIO_BAND[1]).contains(&ratio)
            && weighted <= WEIGHTED_MASS_DRIFT_MAX,
        format!(
            "mass drift at dt = {CONS_DT:.0e}: {mass_drift:.2e} (≤ {MASS_DRIFT_MAX:.0e}); at dt = {CONS_STUDY_DT:.0e}: energy drift ratio under halving {ratio:.3} (in [{}, {}]), weighted mass drift {weighted:.2e} (≤ {WEIGHTED_MASS_DRIFT_MAX:.0e}); for reference at dt = {CONS_DT:.0e}: ratio {coarse_ratio:.3}, weighted drift {coarse_weighted:.2e}",
            ENERGY_RATIO_BAND[0], ENERGY_RATIO_BAND[1]
        ),
    )
}

fn criterion_5() -> Outcome {
    let (limit, gauge) = dynamics_gauge(DYN_EPS);
    let w = default_datum(DYN_GRID);
    let u0 = well_prepared_data(&w, &limit, &gauge).unwrap();
    let discrepancy = |dt: f64| {
        let mut cfg = SolverConfig::new(DYN_GRID, dt, TWO_INT_T, TWO_INT_P, Scheme::Rk4Gauged);
        cfg.dealias = false;
        cfg.store_stride = (TWO_INT_T / dt).round() as usize / 50;
        cfg.gammas.clear();
        let direct = gauge_transform(
            &solve_physical(&u0, &cfg.with_scheme(Scheme::StrangPhysical), &gauge.xi).unwrap(),
            &gauge,
        )
        .unwrap();
        let gauged = solve_gauged(&w, &cfg, &gauge).unwrap();
        assert_eq!(direct.times, gauged.times);
        direct
            .frames
            .iter()
            .zip(&gauged.frames)
            .map(|(a, b)| l2(&a.sub(b).unwrap()) / l2(b))
            .fold(0.0, f64::max)
    };
    let d1 = discrepancy(TWO_INT_DT);
    let d2 = discrepancy(TWO_INT_DT / 2.0);
    outcome(
        d1 <= TWO_INT_MAX && d1 >= TWO_INT_HALVING_GAIN * d2,
        format!(
            "sup-frame relative L² gap {d1:.3e} at dt = {TWO_INT_DT:.0e} (≤ {TWO_INT_MAX:.0e}), {d2:.3e} at dt/2 (gain {:.2}, need ≥ {TWO_INT_HALVING_GAIN})",
            d1 / d2
        ),
    )
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_6() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for &p in &CONV_P_LIST {
        let plan = StudyPlan {
            checks: PlanChecks {
                decreasing_gamma: Some(CONV_GAMMA),
                min_seed_fraction: Some(STUDY_MIN_GOOD as f64 / STUDY_SEEDS as f64),
                initial_identity_tol: Some(INITIAL_IDENTITY_TOL),
                ..PlanChecks::default()
            },
            ..study_plan(p, vec![0.0, CONV_GAMMA, 1.9])
        };
        let report = monte_carlo_sweep(&plan, StudyKind::Epsilon).unwrap();
        let mut good = 0;
        let mut worst_initial = 0.0f64;
        let mut complete = 0;
        for (_, r) in report.epsilon_seeds() {
            if r.epsilons.len() == STUDY_EPS_POWERS.len() {
                complete += 1;
            }
            let d: Vec<f64> = r.direct.iter().map(|row| row[1]).collect();
            if d.len() == STUDY_EPS_POWERS.len() && strictly_decreasing(&d) {
                good += 1;
            }
            worst_initial = r.initial_identity.iter().copied().fold(worst_initial, f64::max);
        }
        let ok = good >= STUDY_MIN_GOOD && complete == STUDY_SEEDS && worst_initial <= INITIAL_IDENTITY_TOL;
        passed &= ok && report.all_checks_pass();
        parts.push(format!(
            "p = {p}: D(ε, γ = {CONV_GAMMA}) strictly decreasing in {good} of {STUDY_SEEDS} seeds, max ‖v_ε(0) − w‖_H² = {worst_initial:.1e}"
        ));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let plan = StudyPlan {
        checks: PlanChecks {
            decreasing_gamma: Some(MODULUS_GAMMA),
            min_seed_fraction: Some(STUDY_MIN_GOOD as f64 / STUDY_SEEDS as f64),
            anchor_tol: Some(ANCHOR_TOL),
            ..PlanChecks::default()
        },
        ..study_plan(MODULUS_P, vec![MODULUS_GAMMA])
    };
    let report = monte_carlo_sweep(&plan, StudyKind::Modulus).unwrap();
    let w = default_datum(DYN_GRID);
    let mut worst_anchor = 0.0f64;
    let mut good = 0;
    let mut complete = 0;
    for (seed, r) in report.modulus_seeds() {
        let noise = plan.noise_for(seed, plan.dynamics_lattice()).unwrap();
        let limit = plan.gauge_for(&noise, 0.0).unwrap();
        for (i, &e) in r.epsilons.iter().enumerate() {
            let g = plan.gauge_for(&noise, e).unwrap();
            let diff = GridField::new(
                DYN_GRID,
                w.values()
                    .iter()
                    .zip(g.y.values().iter().zip(limit.y.values()))
                    .map(|(z, (ye, y))| Complex64::new(((-ye.re).exp() - (-y.re).exp()) * z.norm(), 0.0))
                    .collect(),
            )
            .unwrap();
            worst_anchor = worst_anchor.max((h_gamma(&diff, MODULUS_GAMMA) - r.anchor_measured[i][0]).abs());
        }
        if r.epsilons.len() == STUDY_EPS_POWERS.len() {
            complete += 1;
        }
        let d: Vec<f64> = r.hgamma.iter().map(|row| row[0]).collect();
        if d.len() == STUDY_EPS_POWERS.len() && strictly_decreasing(&d) {
            good += 1;
        }
    }
    outcome(
        worst_anchor <= ANCHOR_TOL && good >= STUDY_MIN_GOOD && complete == STUDY_SEEDS && report.all_checks_pass(),
        format!(
            "t = 0 anchor vs ‖(e^(−Y_ε) − e^(−Y))|w|‖_H^{MODULUS_GAMMA}: max gap {worst_anchor:.1e} (≤ {ANCHOR_TOL:.0e}); sup-in-time difference decreasing in {good} of {STUDY_SEEDS} seeds"
        ),
    )
}

fn criterion_8() -> Outcome {
    let plan = StudyPlan {
        checks: PlanChecks {
            dispersive_b_max: Some(DISPERSIVE_B_MAX),
            ..PlanChecks::default()
        },
        ..StudyPlan::default()
    };
    let report = monte_carlo_sweep(&plan, StudyKind::Dispersive).unwrap();
    let mut bs = Vec::new();
    for (_, r) in report.dispersive_seeds() {
        for d in &r.dispersive {
            // b from its definition ‖v‖²_{L²W^{1,4}} = (sup_t ‖v‖_H²)^b.
            bs.push(d.b_squared.ln() / d.h2_sup.ln());
        }
    }
    let expected = plan.sample_count * plan.eps_grid.len();
    let worst = bs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        bs.len() == expected && worst < DISPERSIVE_B_MAX && report.all_checks_pass(),
        format!(
            "default sweep (M = {}, p = {}, ε ∈ {:?}): {} exponents, largest b = {worst:.4} (need < {DISPERSIVE_B_MAX})",
            plan.sample_count, plan.p, plan.eps_grid, bs.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let base = StudyPlan {
        sample_count: 1,
        eps_grid: STUDY_EPS_POWERS.iter().map(|&k| eps(k)).collect(),
        allow_underresolved_epsilon: true,
        solver: SolverSection {
            n: DYN_GRID,
            ..SolverSection::default()
        },
        ..StudyPlan::default()
    };

    // Fields vanish, C_ε does not: only a phase depends on ε.
    let mut zero = base.clone();
    zero.noise.zero = true;
    zero.noise.amplitude = 1.0;
    let zr = monte_carlo_sweep(&zero, StudyKind::Strichartz).unwrap();
    let (_, zrep) = zr.strichartz_seeds().next().expect("zero-gauge probe completed");
    let first = &zrep.rows[0].ratios;
    let mut spread = 0.0f64;
    for row in &zrep.rows {
        for (a, b) in row.ratios.iter().zip(first) {
            spread = spread.max((a - b).abs() / b);
        }
    }
    let c_range = {
        let noise = zero.noise_for(zero.base_seed, zero.dynamics_lattice()).unwrap();
        let c: Vec<f64> = zero.eps_grid.iter().map(|&e| zero.gauge_for(&noise, e).unwrap().c_eps).collect();
        (c[0], c[c.len() - 1])
    };

    let sampled = StudyPlan {
        checks: PlanChecks {
            strichartz_max_exponent: Some(STRICHARTZ_MAX_EXPONENT),
            ..PlanChecks::default()
        },
        ..base
    };
    let sr = monte_carlo_sweep(&sampled, StudyKind::Strichartz).unwrap();
    let srep = sr.strichartz_seeds().next().map(|(_, r)| r.clone());
    let (finite, exponent, maxima) = match &srep {
        Some(r) => (
            r.rows.iter().flat_map(|x| &x.ratios).all(|v| v.is_finite()),
            r.fit.as_ref().map(|f| f.fitted_exponent),
            r.rows.iter().map(|x| x.max_ratio).collect::<Vec<_>>(),
        ),
        None => (false, None, Vec::new()),
    };
    let oracle_exponent = (maxima.len() >= 2).then(|| {
        let x: Vec<f64> = sampled.eps_grid.iter().map(|e| e.ln().abs().ln()).collect();
        let y: Vec<f64> = maxima.iter().map(|m| m.ln()).collect();
        ols(&x, &y).0
    });
    let exp_ok = matches!((exponent, oracle_exponent), (Some(a), Some(b)) if (a - b).abs() < 1e-9 && a <= STRICHARTZ_MAX_EXPONENT);
    outcome(
        spread <= ZERO_GAUGE_TOL && finite && exp_ok && sr.all_checks_pass(),
        format!(
            "zero fields (C_ε from {:.3} to {:.3}): relative spread of ratios over ε {spread:.1e} (≤ {ZERO_GAUGE_TOL:.0e}); sampled gauge (σ = {}): ratios finite {finite}, maxima {maxima:.4?}, |log ε| exponent {:.3e} (≤ {STRICHARTZ_MAX_EXPONENT})",
            c_range.0,
            c_range.1,
            sampled.noise.amplitude,
            exponent.unwrap_or(f64::NAN)
        ),
    )
}

fn cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_wicknls"))
        .args(args)
        .env_remove("WICKNLS_OUT_DIR")
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

/// Data files (everything except the manifest) with their bytes, by name.
fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with("manifest.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[derive(Default)]
struct Tally {
    mismatches: Vec<String>,
    bad_codes: Vec<String>,
    compared: usize,
}

impl Tally {
    /// Runs the same command into two fresh directories and compares the
    /// data files.
    fn twice(&mut self, root: &Path, label: &str, make: &dyn Fn(&Path) -> Vec<String>, ok_codes: &[i32]) {
        let a = root.join(format!("{label}_a"));
        let b = root.join(format!("{label}_b"));
        for dir in [&a, &b] {
            std::fs::create_dir_all(dir).unwrap();
            let args = make(dir);
            let code = cli(&args.iter().map(String::as_str).collect::<Vec<_>>());
            if !ok_codes.contains(&code) {
                self.bad_codes.push(format!("{label}: exit {code}"));
            }
        }
        let (fa, fb) = (data_files(&a), data_files(&b));
        self.compared += fa.len();
        if fa.is_empty() || fa != fb {
            self.mismatches.push(label.to_string());
        }
    }
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path();
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let mut tally = Tally::default();

    tally.twice(
        root,
        "sample_noise",
        &|d| {
            ["sample-noise", "--seed", "42", "--lattice", "63", "--out"]
                .iter()
                .map(|a| a.to_string())
                .chain([s(&d.join("noise.bin"))])
                .collect()
        },
        &[0],
    );

    for (label, scheme) in [("run_physical", "strang_physical"), ("run_gauged", "rk4_gauged")] {
        let cfg = root.join(format!("{label}.toml"));
        std::fs::write(
            &cfg,
            format!(
                "seed = 4\nepsilon = 0.25\n[solver]\nn = 32\ndt = 1e-3\nt_final = 0.1\np = 3.0\nscheme = \"{scheme}\"\nstore_stride = 5\n[noise]\namplitude = 0.1\n"
            ),
        )
        .unwrap();
        tally.twice(root, label, &|d| vec!["run".into(), "--config".into(), s(&cfg), "--out".into(), s(d)], &[0]);
    }

    let plan = StudyPlan {
        sample_count: 2,
        eps_grid: vec![0.5, 0.25],
        gamma_list: vec![0.0, 0.5],
        p: 3.0,
        solver: SolverSection {
            n: 32,
            dt: 1e-3,
            t_final: 0.1,
            ..SolverSection::default()
        },
        probe: wicknls::diagnostics::StrichartzParams {
            sample_count: 2,
            bandlimit: 4,
            t_final: 0.1,
            ..Default::default()
        },
        ..StudyPlan::default()
    };
    let plan_path = root.join("plan.toml");
    std::fs::write(&plan_path, plan.to_toml()).unwrap();
    for kind in StudyKind::ALL {
        for jobs in ["1", "2"] {
            tally.twice(
                root,
                &format!("study_{kind}_jobs{jobs}"),
                &|d| {
                    vec![
                        "study".into(),
                        "--plan".into(),
                        s(&plan_path),
                        "--study".into(),
                        kind.name().into(),
                        "--jobs".into(),
                        jobs.into(),
                        "--out".into(),
                        s(d),
                    ]
                },
                &[0, 4],
            );
        }
        let one = data_files(&root.join(format!("study_{kind}_jobs1_a")));
        let two = data_files(&root.join(format!("study_{kind}_jobs2_a")));
        if one != two {
            tally.mismatches.push(format!("study_{kind} jobs 1 vs 2"));
        }
    }
    outcome(
        tally.mismatches.is_empty() && tally.bad_codes.is_empty(),
        format!(
            "{} data files from sample-noise, run and every study kind compared across reruns and --jobs 1/2; mismatches {:?}; unexpected exits {:?}",
            tally.compared, tally.mismatches, tally.bad_codes
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "renormalization oracle", criterion_1),
        (2, "Wick centering", criterion_2),
        (3, "stochastic scaling", criterion_3),
        (4, "conservation", criterion_4),
        (5, "two-integrator oracle", criterion_5),
        (6, "convergence study", criterion_6),
        (7, "modulus convergence", criterion_7),
        (8, "dispersive gain", criterion_8),
        (9, "free-propagator control", criterion_9),
        (10, "determinism", criterion_10),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.passed {
            failed += 1;
        }
        println!(
            "criterion {id:>2} ({name}): {} [{:.1} s] {}",
            if result.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
