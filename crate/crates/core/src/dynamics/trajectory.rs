use num_complex::Complex64;

use super::{physical_energy, weighted_mass, SolverConfig};
use crate::noise_field::GaugeData;
use crate::spectral::{lp_norm, sobolev_norm, GridField, TimeSeriesNorms};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    /// The physical solution `u_ε`.
    Physical,
    /// The gauged variable `v_ε = e^{iC_ε t} e^{Y_ε} u_ε`.
    Gauged,
}

/// Stored frames of one run with per-frame diagnostics.
///
/// Diagnostic columns: `mass`, `energy`, `h<γ>` for each configured γ, and
/// `linf`. For gauged trajectories `mass` is the weighted mass
/// `⟨e^{−2Y}|v|²⟩` and `energy` is the physical energy of `e^{−Y}v`, so both
/// columns are conserved by either route.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub frames: Vec<GridField>,
    pub norms: TimeSeriesNorms,
    pub variable: Variable,
}

pub(crate) enum NormContext<'a> {
    Physical { xi: &'a GridField },
    Gauged { gauge: &'a GaugeData },
}

pub(crate) fn column_names(gammas: &[f64]) -> Vec<String> {
    let mut names = vec!["mass".to_string(), "energy".to_string()];
    names.extend(gammas.iter().map(|g| format!("h{g}")));
    names.push("linf".to_string());
    names
}

fn frame_diagnostics(frame: &GridField, cfg: &SolverConfig, ctx: &NormContext<'_>) -> Vec<f64> {
    let (mass, energy) = match ctx {
        NormContext::Physical { xi } => (
            frame.mean_abs2(),
            physical_energy(frame, xi, cfg.p, cfg.nonlinearity),
        ),
        NormContext::Gauged { gauge } => {
            let u = GridField::new(
                frame.n(),
                frame
                    .values()
                    .iter()
                    .zip(gauge.exp_neg_y())
                    .map(|(z, e)| z * *e)
                    .collect::<Vec<Complex64>>(),
            )
            .expect("frame and gauge share the grid");
            (
                weighted_mass(frame, gauge),
                physical_energy(&u, &gauge.xi, cfg.p, cfg.nonlinearity),
            )
        }
    };
    let mut out = vec![mass, energy];
    out.extend(cfg.gammas.iter().map(|&g| sobolev_norm(frame, g)));
    out.push(lp_norm(frame, f64::INFINITY));
    out
}

impl Trajectory {
    /// Computes diagnostics and, for backward runs, reorders frames so that
    /// times increase.
    pub(crate) fn assemble(
        config: SolverConfig,
        mut times: Vec<f64>,
        mut frames: Vec<GridField>,
        variable: Variable,
        ctx: NormContext<'_>,
    ) -> Result<Self> {
        if config.backward {
            times.reverse();
            frames.reverse();
        }
        let mut norms = TimeSeriesNorms::new(column_names(&config.gammas));
        for (t, f) in times.iter().zip(&frames) {
            norms.push(*t, &frame_diagnostics(f, &config, &ctx))?;
        }
        Ok(Trajectory {
            config,
            times,
            frames,
            norms,
            variable,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> &GridField {
        self.frames.last().expect("trajectory has frames")
    }
}
