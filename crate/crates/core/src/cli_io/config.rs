use serde::{Deserialize, Serialize};

use crate::dynamics::{solve_gauged, solve_physical, well_prepared_data, Scheme, SolverConfig, Trajectory};
use crate::experiments::{DatumSpec, NoiseSection};
use crate::noise_field::{
    build_gauge_data_on_lattice, check_resolution, grid_lattice_halfwidth, GaugeData, MollifierSpec,
    NoiseRealization,
};
use crate::spectral::GridField;
use crate::{Error, Result};

/// One solve, read from TOML:
///
/// ```toml
/// seed = 7
/// epsilon = 0.0625          # 0 selects the unmollified potential
/// well_prepared = true
///
/// [solver]
/// n = 128
/// dt = 1e-3
/// t_final = 0.5
/// p = 3.0
/// scheme = "strang_physical"   # or "rk4_gauged"
/// store_stride = 10
///
/// [noise]
/// amplitude = 0.1
///
/// [[datum.modes]]
/// k = [1, 0]
/// c = [1.0, 0.0]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub epsilon: f64,
    #[serde(default)]
    pub allow_underresolved_epsilon: bool,
    /// Physical runs start from `e^{−Y_ε}w` and gauged runs from `w`, so the
    /// gauged datum is `w` for every ε. Otherwise `w` is the physical datum.
    #[serde(default = "yes")]
    pub well_prepared: bool,
    pub solver: SolverConfig,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub datum: DatumSpec,
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!("ε = {} must lie in [0, 1)", self.epsilon)));
        }
        if self.epsilon > 0.0 && !self.allow_underresolved_epsilon {
            check_resolution(self.epsilon, self.solver.n)?;
        }
        self.noise.validate()?;
        let k = self.lattice();
        if k == 0 || k > grid_lattice_halfwidth(self.solver.n) {
            return Err(Error::invalid(format!(
                "noise lattice {k} must lie in 1..={}",
                grid_lattice_halfwidth(self.solver.n)
            )));
        }
        self.datum.to_field(self.solver.n)?;
        Ok(())
    }

    /// Half-width of the potential lattice; `N/4` unless set.
    pub fn lattice(&self) -> usize {
        self.noise.lattice.unwrap_or(self.solver.n / 4)
    }

    pub fn noise(&self) -> Result<NoiseRealization> {
        self.noise.realize(self.seed, self.lattice())
    }

    fn gauge(&self, noise: &NoiseRealization, epsilon: f64) -> Result<GaugeData> {
        let spec = if epsilon == 0.0 {
            MollifierSpec::identity()
        } else {
            MollifierSpec::bump(epsilon)?
        };
        build_gauge_data_on_lattice(noise, &spec, self.solver.n, self.lattice())
    }

    pub fn execute(&self) -> Result<Trajectory> {
        self.validate()?;
        let noise = self.noise()?;
        let limit = self.gauge(&noise, 0.0)?;
        let gauge = if self.epsilon == 0.0 {
            limit.clone()
        } else {
            self.gauge(&noise, self.epsilon)?
        };
        let w = self.datum.to_field(self.solver.n)?;
        match self.solver.scheme {
            Scheme::StrangPhysical => {
                let u0 = if self.well_prepared {
                    well_prepared_data(&w, &limit, &gauge)?
                } else {
                    w
                };
                solve_physical(&u0, &self.solver, &gauge.xi)
            }
            Scheme::Rk4Gauged => {
                let v0 = if self.well_prepared {
                    w
                } else {
                    GridField::new(w.n(), w.values().iter().zip(gauge.exp_y()).map(|(z, e)| z * *e).collect())?
                };
                solve_gauged(&v0, &self.solver, &gauge)
            }
        }
    }
}
