use serde::Serialize;

use super::convergence::{DispersiveSeed, EpsilonSeed, ModulusSeed};
use super::plan::StudyKind;
use crate::diagnostics::{StochasticReport, StrichartzReport};

/// One cell of an output table.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "table {}", self.name);
        self.rows.push(row);
    }
}

/// Order statistics of a sample; independent of the order of the input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let quantile = |q: f64| {
            let pos = q * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
        };
        Some(Stats {
            count: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q25: quantile(0.25),
            median: quantile(0.5),
            q75: quantile(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub quantity: String,
    pub epsilon: Option<f64>,
    pub gamma: Option<f64>,
    pub stats: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "study", rename_all = "snake_case")]
pub enum SeedResult {
    Epsilon(EpsilonSeed),
    Modulus(ModulusSeed),
    Bounds(StochasticReport),
    Strichartz(StrichartzReport),
    Dispersive(DispersiveSeed),
}

/// Result for one noise realization. A failed run keeps whatever was
/// computed before the failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub result: Option<SeedResult>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyReport {
    pub study: StudyKind,
    /// Ordered by seed.
    pub outcomes: Vec<SeedOutcome>,
    pub aggregates: Vec<Aggregate>,
    /// Row-wise seed average, refitted (bounds study only).
    pub averaged_bounds: Option<StochasticReport>,
    pub checks: Vec<CheckOutcome>,
}

impl StudyReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SeedOutcome> {
        self.outcomes.iter().filter(|o| o.failure.is_some())
    }

    pub fn epsilon_seeds(&self) -> impl Iterator<Item = (u64, &EpsilonSeed)> {
        self.outcomes.iter().filter_map(|o| match &o.result {
            Some(SeedResult::Epsilon(r)) => Some((o.seed, r)),
            _ => None,
        })
    }

    pub fn modulus_seeds(&self) -> impl Iterator<Item = (u64, &ModulusSeed)> {
        self.outcomes.iter().filter_map(|o| match &o.result {
            Some(SeedResult::Modulus(r)) => Some((o.seed, r)),
            _ => None,
        })
    }

    pub fn bounds_seeds(&self) -> impl Iterator<Item = (u64, &StochasticReport)> {
        self.outcomes.iter().filter_map(|o| match &o.result {
            Some(SeedResult::Bounds(r)) => Some((o.seed, r)),
            _ => None,
        })
    }

    pub fn strichartz_seeds(&self) -> impl Iterator<Item = (u64, &StrichartzReport)> {
        self.outcomes.iter().filter_map(|o| match &o.result {
            Some(SeedResult::Strichartz(r)) => Some((o.seed, r)),
            _ => None,
        })
    }

    pub fn dispersive_seeds(&self) -> impl Iterator<Item = (u64, &DispersiveSeed)> {
        self.outcomes.iter().filter_map(|o| match &o.result {
            Some(SeedResult::Dispersive(r)) => Some((o.seed, r)),
            _ => None,
        })
    }

    /// Data tables of the report, one per CSV file.
    pub fn tables(&self) -> Vec<Table> {
        let mut out = match self.study {
            StudyKind::Epsilon => self.epsilon_tables(),
            StudyKind::Modulus => self.modulus_tables(),
            StudyKind::Bounds => self.bounds_tables(),
            StudyKind::Strichartz => self.strichartz_tables(),
            StudyKind::Dispersive => self.dispersive_tables(),
        };
        let mut agg = Table::new(
            &format!("{}_aggregate", self.study),
            &["quantity", "epsilon", "gamma", "count", "mean", "min", "q25", "median", "q75", "max"],
        );
        for a in &self.aggregates {
            let s = &a.stats;
            agg.push(vec![
                a.quantity.as_str().into(),
                a.epsilon.into(),
                a.gamma.into(),
                s.count.into(),
                s.mean.into(),
                s.min.into(),
                s.q25.into(),
                s.median.into(),
                s.q75.into(),
                s.max.into(),
            ]);
        }
        out.push(agg);
        let mut fails = Table::new(&format!("{}_failures", self.study), &["seed", "failure"]);
        for o in self.failures() {
            fails.push(vec![o.seed.into(), o.failure.as_deref().unwrap_or("").into()]);
        }
        out.push(fails);
        out
    }

    fn epsilon_tables(&self) -> Vec<Table> {
        let mut direct = Table::new("epsilon_direct", &["seed", "epsilon", "gamma", "sup_diff"]);
        let mut cauchy = Table::new(
            "epsilon_cauchy",
            &["seed", "epsilon_k", "epsilon_k1", "gamma", "sup_diff"],
        );
        let mut initial = Table::new("epsilon_initial", &["seed", "epsilon", "h2_gap"]);
        let mut reference = Table::new(
            "epsilon_reference",
            &["seed", "c_eps", "y_sup", "h2_sup", "weighted_mass_drift", "frames"],
        );
        for (seed, r) in self.epsilon_seeds() {
            for (i, &e) in r.epsilons.iter().enumerate() {
                for (j, &g) in r.gammas.iter().enumerate() {
                    direct.push(vec![seed.into(), e.into(), g.into(), r.direct[i][j].into()]);
                }
                initial.push(vec![seed.into(), e.into(), r.initial_identity[i].into()]);
            }
            for (k, row) in r.cauchy.iter().enumerate() {
                for (j, &g) in r.gammas.iter().enumerate() {
                    cauchy.push(vec![
                        seed.into(),
                        r.epsilons[k].into(),
                        r.epsilons[k + 1].into(),
                        g.into(),
                        row[j].into(),
                    ]);
                }
            }
            let m = &r.reference;
            reference.push(vec![
                seed.into(),
                m.c_eps.into(),
                m.y_sup.into(),
                m.h2_sup.into(),
                m.weighted_mass_drift.into(),
                m.frames.into(),
            ]);
        }
        vec![direct, cauchy, initial, reference]
    }

    fn modulus_tables(&self) -> Vec<Table> {
        let mut diff = Table::new("modulus", &["seed", "epsilon", "norm", "sup_diff"]);
        let mut anchor = Table::new("modulus_anchor", &["seed", "epsilon", "norm", "measured", "analytic"]);
        for (seed, r) in self.modulus_seeds() {
            for (i, &e) in r.epsilons.iter().enumerate() {
                for (j, &g) in r.gammas.iter().enumerate() {
                    let name = format!("h{g}");
                    diff.push(vec![seed.into(), e.into(), name.as_str().into(), r.hgamma[i][j].into()]);
                    anchor.push(vec![
                        seed.into(),
                        e.into(),
                        name.as_str().into(),
                        r.anchor_measured[i][j].into(),
                        r.anchor_analytic[i][j].into(),
                    ]);
                }
                diff.push(vec![seed.into(), e.into(), "linf".into(), r.linf[i].into()]);
                anchor.push(vec![
                    seed.into(),
                    e.into(),
                    "linf".into(),
                    r.anchor_linf_measured[i].into(),
                    r.anchor_linf_analytic[i].into(),
                ]);
            }
        }
        vec![diff, anchor]
    }

    fn bounds_tables(&self) -> Vec<Table> {
        let p_list = self
            .bounds_seeds()
            .next()
            .map(|(_, r)| r.p_list.clone())
            .unwrap_or_default();
        let mut header = vec!["seed", "epsilon", "c_eps", "y_sup", "y_dist_to_limit", "grad_l2_squared"];
        let names: Vec<String> = p_list
            .iter()
            .flat_map(|p| [format!("grad_l{p}"), format!("wick_l{p}")])
            .collect();
        header.extend(names.iter().map(String::as_str));
        let mut rows = Table::new("bounds", &header);
        let mut fits = Table::new(
            "bounds_fits",
            &["seed", "quantity", "p", "model", "constant", "exponent", "r_squared", "envelope"],
        );
        let mut push_fits = |seed: Cell, r: &StochasticReport| {
            let mut add = |q: &str, p: Option<f64>, f: &crate::diagnostics::ScalingFit| {
                fits.push(vec![
                    seed.clone(),
                    q.into(),
                    p.into(),
                    format!("{:?}", f.model).to_lowercase().as_str().into(),
                    f.fitted_constant.into(),
                    f.fitted_exponent.into(),
                    f.r_squared.into(),
                    f.envelope_constant.into(),
                ]);
            };
            add("y_sup", None, &r.y_fit);
            for (k, &p) in r.p_list.iter().enumerate() {
                add("grad", Some(p), &r.grad_fits[k]);
                add("wick", Some(p), &r.wick_fits[k]);
            }
            fits.push(vec![
                seed.clone(),
                "c_eps_linear".into(),
                Cell::Empty,
                "linear".into(),
                r.c_fit.intercept.into(),
                r.c_fit.slope.into(),
                r.c_fit.r_squared.into(),
                Cell::Empty,
            ]);
        };
        for (seed, r) in self.bounds_seeds() {
            for row in &r.rows {
                let mut cells: Vec<Cell> = vec![
                    seed.into(),
                    row.epsilon.into(),
                    row.c_eps.into(),
                    row.y_sup.into(),
                    row.y_dist_to_limit.into(),
                    row.grad_l2_squared.into(),
                ];
                for k in 0..row.grad_lp.len() {
                    cells.push(row.grad_lp[k].into());
                    cells.push(row.wick_lp[k].into());
                }
                rows.push(cells);
            }
            push_fits(seed.into(), r);
        }
        if let Some(avg) = &self.averaged_bounds {
            push_fits("mean".into(), avg);
        }
        vec![rows, fits]
    }

    fn strichartz_tables(&self) -> Vec<Table> {
        let mut ratios = Table::new("strichartz", &["seed", "epsilon", "sample", "ratio"]);
        let mut fits = Table::new("strichartz_fits", &["seed", "constant", "exponent", "r_squared"]);
        for (seed, r) in self.strichartz_seeds() {
            for row in &r.rows {
                for (i, &x) in row.ratios.iter().enumerate() {
                    ratios.push(vec![seed.into(), row.epsilon.into(), i.into(), x.into()]);
                }
            }
            if let Some(f) = &r.fit {
                fits.push(vec![
                    seed.into(),
                    f.fitted_constant.into(),
                    f.fitted_exponent.into(),
                    f.r_squared.into(),
                ]);
            }
        }
        vec![ratios, fits]
    }

    fn dispersive_tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "dispersive",
            &[
                "seed",
                "epsilon",
                "a_norm",
                "b_squared",
                "h2_sup",
                "exponent_a",
                "exponent_b",
                "h1_sup",
                "h1_plus_sup",
                "weighted_laplacian_sup",
                "ellreg_ratio",
            ],
        );
        let mut fits = Table::new("dispersive_h2_fit", &["seed", "constant", "exponent", "r_squared"]);
        for (seed, r) in self.dispersive_seeds() {
            for (i, &e) in r.epsilons.iter().enumerate() {
                let d = &r.dispersive[i];
                let b = &r.bounds[i];
                t.push(vec![
                    seed.into(),
                    e.into(),
                    d.a_norm.into(),
                    d.b_squared.into(),
                    d.h2_sup.into(),
                    d.exponent_a.into(),
                    d.exponent_b.into(),
                    b.h1_sup.into(),
                    b.h1_plus_sup.into(),
                    b.weighted_laplacian_sup.into(),
                    b.ellreg_ratio.into(),
                ]);
            }
            if let Some(f) = &r.h2_fit {
                fits.push(vec![
                    seed.into(),
                    f.fitted_constant.into(),
                    f.fitted_exponent.into(),
                    f.r_squared.into(),
                ]);
            }
        }
        vec![t, fits]
    }
}
