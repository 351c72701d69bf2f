use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sup-norm above which a run is declared blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Strang split-step for `u`: exact pointwise phase and exact free flow.
    StrangPhysical,
    /// Integrating-factor RK4 for the gauged variable `v`.
    Rk4Gauged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_final: f64,
    pub p: f64,
    pub scheme: Scheme,
    /// 2/3-rule truncation of pseudo-spectral products (gauged scheme only).
    #[serde(default)]
    pub dealias: bool,
    #[serde(default = "one_stride")]
    pub store_stride: usize,
    /// Coefficient of the defocusing term; `1` is the model, `0` the linear
    /// flow.
    #[serde(default = "one")]
    pub nonlinearity: f64,
    /// Sobolev indices recorded at every stored frame.
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    /// Integrate over `[−T, 0]` instead of `[0, T]`.
    #[serde(default)]
    pub backward: bool,
}

fn one() -> f64 {
    1.0
}

fn one_stride() -> usize {
    1
}

fn default_gammas() -> Vec<f64> {
    vec![1.0, 2.0]
}

impl SolverConfig {
    /// Defaults: dealiasing on for the gauged scheme only, and a stride
    /// keeping about 200 frames.
    pub fn new(n: usize, dt: f64, t_final: f64, p: f64, scheme: Scheme) -> Self {
        let steps = (t_final / dt).round().max(1.0) as usize;
        SolverConfig {
            n,
            dt,
            t_final,
            p,
            scheme,
            dealias: scheme == Scheme::Rk4Gauged,
            store_stride: (steps / 200).max(1),
            nonlinearity: 1.0,
            gammas: default_gammas(),
            backward: false,
        }
    }

    /// Same configuration with another scheme. The dealiasing flag is kept;
    /// the split-step scheme never reads it.
    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        SolverConfig {
            scheme,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(Error::invalid(format!("grid size {} must be a power of two ≥ 4", self.n)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::invalid(format!(
                "horizon T = {} must be at least dt = {}",
                self.t_final, self.dt
            )));
        }
        if !(self.p.is_finite() && self.p >= 2.0) {
            return Err(Error::invalid(format!("nonlinearity power p = {} must be ≥ 2", self.p)));
        }
        if self.store_stride == 0 {
            return Err(Error::invalid("store_stride must be ≥ 1"));
        }
        if !(self.nonlinearity.is_finite() && self.nonlinearity >= 0.0) {
            return Err(Error::invalid("nonlinearity coefficient must be ≥ 0 (defocusing)"));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(-2.0..=4.0).contains(*g)) {
            return Err(Error::invalid(format!("recorded Sobolev index {g} outside [-2, 4]")));
        }
        Ok(())
    }

    pub fn step_count(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Number of stored frames, `⌊steps / stride⌋ + 1`.
    pub fn frame_count(&self) -> usize {
        self.step_count() / self.store_stride + 1
    }

    pub(crate) fn signed_dt(&self) -> f64 {
        if self.backward {
            -self.dt
        } else {
            self.dt
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_counts() {
        let c = SolverConfig::new(128, 1e-4, 1.0, 3.0, Scheme::Rk4Gauged);
        assert!(c.dealias);
        assert_eq!(c.store_stride, 50);
        assert_eq!(c.frame_count(), 201);
        c.validate().unwrap();
        let s = SolverConfig::new(128, 1e-3, 0.5, 3.0, Scheme::StrangPhysical);
        assert!(!s.dealias);
        assert_eq!(s.store_stride, 2);
        assert_eq!(s.frame_count(), 251);
        assert_eq!(c.with_scheme(Scheme::StrangPhysical).scheme, Scheme::StrangPhysical);
    }

    #[test]
    fn validation() {
        let base = SolverConfig::new(64, 1e-3, 0.1, 2.0, Scheme::StrangPhysical);
        for bad in [
            SolverConfig { dt: 0.0, ..base.clone() },
            SolverConfig { t_final: 1e-4, ..base.clone() },
            SolverConfig { p: 1.5, ..base.clone() },
            SolverConfig { store_stride: 0, ..base.clone() },
            SolverConfig { n: 48, ..base.clone() },
            SolverConfig { nonlinearity: -1.0, ..base.clone() },
            SolverConfig { gammas: vec![5.0], ..base.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
