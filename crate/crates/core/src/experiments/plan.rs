use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::StrichartzParams;
use crate::dynamics::{Scheme, SolverConfig};
use crate::noise_field::{
    build_gauge_data_on_lattice, check_resolution, grid_lattice_halfwidth, sample_noise_scaled,
    GaugeData, MollifierSpec, NoiseRealization,
};
use crate::spectral::GridField;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Epsilon,
    Modulus,
    Bounds,
    Strichartz,
    Dispersive,
}

impl StudyKind {
    pub const ALL: [StudyKind; 5] = [
        StudyKind::Epsilon,
        StudyKind::Modulus,
        StudyKind::Bounds,
        StudyKind::Strichartz,
        StudyKind::Dispersive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Epsilon => "epsilon",
            StudyKind::Modulus => "modulus",
            StudyKind::Bounds => "bounds",
            StudyKind::Strichartz => "strichartz",
            StudyKind::Dispersive => "dispersive",
        }
    }
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StudyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown study '{s}'")))
    }
}

/// Grid and time stepping shared by every run of a study. Both routes use
/// the same grid, step and stride so their frames line up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    /// 2/3-rule truncation in the gauged runs; off by default so both routes
    /// see the same products.
    #[serde(default)]
    pub dealias: bool,
    /// Defaults to about 50 stored frames.
    #[serde(default)]
    pub store_stride: Option<usize>,
    #[serde(default)]
    pub backward: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            n: 128,
            dt: 2e-4,
            t_final: 0.5,
            dealias: false,
            store_stride: None,
            backward: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// Standard deviation of every Fourier coefficient.
    pub amplitude: f64,
    /// Use the all-zero realization of the law (fields vanish, `C_ε` does
    /// not). Combine with `amplitude = 0` for a noise that is zero in law.
    pub zero: bool,
    /// Half-width of the lattice carrying the potential in the dynamical
    /// studies; `None` means `N/4`. The bounds study always uses the full
    /// grid lattice `N/2 − 1`.
    pub lattice: Option<usize>,
}

impl NoiseSection {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::invalid("noise amplitude must be finite and ≥ 0"));
        }
        Ok(())
    }

    /// The realization for `seed` on a lattice of half-width `k`.
    pub fn realize(&self, seed: u64, k: usize) -> Result<NoiseRealization> {
        if self.zero {
            let side = 2 * k + 1;
            NoiseRealization::from_coefficients(seed, k, self.amplitude, vec![Complex64::new(0.0, 0.0); side * side])
        } else {
            sample_noise_scaled(seed, k as i64, self.amplitude)
        }
    }
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            amplitude: 1.0,
            zero: false,
            lattice: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    /// Wave vector `(k₁, k₂)`.
    pub k: [i64; 2],
    /// Coefficient as `[re, im]`.
    pub c: [f64; 2],
}

/// Trigonometric polynomial `w = Σ c e^{ik·x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSpec {
    pub modes: Vec<ModeSpec>,
}

impl Default for DatumSpec {
    /// `w = e^{ix₁} + ½e^{−ix₂}`.
    fn default() -> Self {
        DatumSpec {
            modes: vec![
                ModeSpec {
                    k: [1, 0],
                    c: [1.0, 0.0],
                },
                ModeSpec {
                    k: [0, -1],
                    c: [0.5, 0.0],
                },
            ],
        }
    }
}

impl DatumSpec {
    pub fn to_field(&self, n: usize) -> Result<GridField> {
        if self.modes.is_empty() {
            return Err(Error::invalid("datum needs at least one mode"));
        }
        let modes: Vec<_> = self
            .modes
            .iter()
            .map(|m| ((m.k[0], m.k[1]), Complex64::new(m.c[0], m.c[1])))
            .collect();
        GridField::from_modes(n, &modes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsSection {
    /// Lebesgue exponents for `∇Y_ε` and the Wick square.
    pub p_list: Vec<f64>,
    /// Grid for the stochastic bounds; defaults to the solver grid.
    pub n: Option<usize>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection {
            p_list: vec![2.0, 4.0],
            n: None,
        }
    }
}

/// Pass/fail checks evaluated on the aggregate report. Each is optional;
/// only the ones present are evaluated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanChecks {
    /// γ for which `D(ε_k, γ)` (or the modulus difference) must decrease
    /// strictly along the ε-grid.
    pub decreasing_gamma: Option<f64>,
    /// Fraction of seeds that must satisfy the decrease check.
    pub min_seed_fraction: Option<f64>,
    /// Bound on `‖v_ε(0) − w‖_{H²}`.
    pub initial_identity_tol: Option<f64>,
    /// Bound on the gap between the measured and analytic `t = 0` modulus
    /// difference.
    pub anchor_tol: Option<f64>,
    /// Lower bound on r² of `C_ε` against `log(1/ε)`.
    pub c_fit_r2_min: Option<f64>,
    /// Accepted band `[lo, hi]` of the `|log ε|` exponent of `‖∇Y_ε‖_{L^p}`.
    pub grad_exponent: Option<[f64; 2]>,
    /// Accepted band of the exponent of `‖:|∇Y_ε|²:‖_{L^p}`.
    pub wick_exponent: Option<[f64; 2]>,
    /// Lower bound on r² of the exponent fits above.
    pub fit_r2_min: Option<f64>,
    /// Largest accepted `|log ε|` exponent of the maximal probe ratio.
    pub strichartz_max_exponent: Option<f64>,
    /// Strict upper bound on the dispersive exponent `b`.
    pub dispersive_b_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyPlan {
    pub base_seed: u64,
    /// Number of noise realizations `M`; seeds are `base_seed + i`.
    pub sample_count: usize,
    pub eps_grid: Vec<f64>,
    pub gamma_list: Vec<f64>,
    pub p: f64,
    /// Accept `ε·N < 8`.
    #[serde(default)]
    pub allow_underresolved_epsilon: bool,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub datum: DatumSpec,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub probe: StrichartzParams,
    #[serde(default)]
    pub checks: PlanChecks,
}

impl Default for StudyPlan {
    fn default() -> Self {
        StudyPlan {
            base_seed: 1,
            sample_count: 8,
            eps_grid: vec![0.125, 0.0625],
            gamma_list: vec![0.0, 1.0, 1.9],
            p: 4.0,
            allow_underresolved_epsilon: false,
            solver: SolverSection::default(),
            noise: NoiseSection {
                amplitude: 0.1,
                ..NoiseSection::default()
            },
            datum: DatumSpec::default(),
            bounds: BoundsSection::default(),
            probe: StrichartzParams::default(),
            checks: PlanChecks::default(),
        }
    }
}

impl StudyPlan {
    pub fn from_toml(text: &str) -> Result<Self> {
        let plan: StudyPlan = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    /// Seeds of the sweep, in index order.
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.sample_count as u64)
            .map(|i| self.base_seed.wrapping_add(i))
            .collect()
    }

    /// Rejects every constraint violation before any compute starts.
    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::invalid("sample_count must be ≥ 1"));
        }
        if self.eps_grid.is_empty()
            || self.eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0))
            || self.eps_grid.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::invalid("eps_grid must be non-empty, inside (0, 1) and strictly decreasing"));
        }
        if let Some(g) = self.gamma_list.iter().find(|g| !(0.0..2.0).contains(*g)) {
            return Err(Error::invalid(format!("γ = {g} outside [0, 2)")));
        }
        if !self.allow_underresolved_epsilon {
            for &e in &self.eps_grid {
                check_resolution(e, self.solver.n)?;
                if let Some(nb) = self.bounds.n {
                    check_resolution(e, nb)?;
                }
            }
        }
        self.noise.validate()?;
        if let Some(k) = self.noise.lattice {
            if k == 0 || k > grid_lattice_halfwidth(self.solver.n) {
                return Err(Error::invalid(format!(
                    "noise lattice {k} must lie in 1..={}",
                    grid_lattice_halfwidth(self.solver.n)
                )));
            }
        }
        if let Some(nb) = self.bounds.n {
            if nb < 4 || !nb.is_power_of_two() {
                return Err(Error::invalid(format!("bounds grid {nb} must be a power of two ≥ 4")));
            }
        }
        if self.bounds.p_list.iter().any(|&p| !(p >= 1.0)) {
            return Err(Error::invalid("bounds exponents must be ≥ 1"));
        }
        self.solver_config(Scheme::StrangPhysical).validate()?;
        self.datum.to_field(self.solver.n)?;
        self.probe.validate()?;
        if let Some(f) = self.checks.min_seed_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::invalid("min_seed_fraction must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn solver_config(&self, scheme: Scheme) -> SolverConfig {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.n, s.dt, s.t_final, self.p, scheme);
        cfg.dealias = s.dealias;
        cfg.store_stride = s
            .store_stride
            .unwrap_or_else(|| ((s.t_final / s.dt).round() as usize / 50).max(1));
        cfg.backward = s.backward;
        cfg.gammas = vec![1.0, 2.0];
        cfg
    }

    pub fn dynamics_lattice(&self) -> usize {
        self.noise.lattice.unwrap_or(self.solver.n / 4)
    }

    pub fn bounds_grid(&self) -> usize {
        self.bounds.n.unwrap_or(self.solver.n)
    }

    /// The realization for `seed` on a lattice of half-width `k`.
    pub fn noise_for(&self, seed: u64, k: usize) -> Result<NoiseRealization> {
        self.noise.realize(seed, k)
    }

    /// Gauge objects on the dynamics lattice; `epsilon = 0` is the limit.
    pub fn gauge_for(&self, noise: &NoiseRealization, epsilon: f64) -> Result<GaugeData> {
        let spec = if epsilon == 0.0 {
            MollifierSpec::identity()
        } else {
            MollifierSpec::bump(epsilon)?
        };
        build_gauge_data_on_lattice(noise, &spec, self.solver.n, self.dynamics_lattice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_round_trips_through_toml() {
        let plan = StudyPlan::default();
        plan.validate().unwrap();
        assert_eq!(StudyPlan::from_toml(&plan.to_toml()).unwrap(), plan);
    }

    #[test]
    fn rejects_constraint_violations() {
        let base = StudyPlan::default();
        let bad = [
            StudyPlan { eps_grid: vec![0.0625, 0.125], ..base.clone() },
            StudyPlan { eps_grid: vec![0.125, 0.03125], ..base.clone() },
            StudyPlan { gamma_list: vec![2.0], ..base.clone() },
            StudyPlan { sample_count: 0, ..base.clone() },
            StudyPlan { p: 1.0, ..base.clone() },
        ];
        for plan in bad {
            assert!(plan.validate().is_err(), "{plan:?}");
        }
        let relaxed = StudyPlan {
            eps_grid: vec![0.125, 0.03125],
            allow_underresolved_epsilon: true,
            ..base
        };
        relaxed.validate().unwrap();
    }

    #[test]
    fn minimal_toml() {
        let plan = StudyPlan::from_toml(
            "base_seed = 3\nsample_count = 2\neps_grid = [0.25, 0.125]\ngamma_list = [1.0]\np = 3.0\n\
             [solver]\nn = 64\ndt = 1e-3\nt_final = 0.1\n[[datum.modes]]\nk = [2, 1]\nc = [1.0, 0.0]\n",
        )
        .unwrap();
        assert_eq!(plan.seeds(), vec![3, 4]);
        assert_eq!(plan.dynamics_lattice(), 16);
        assert!(StudyPlan::from_toml("base_seed = 1\nbogus = 2\n").is_err());
        assert!("nope".parse::<StudyKind>().is_err());
        assert_eq!("bounds".parse::<StudyKind>().unwrap(), StudyKind::Bounds);
    }
}
