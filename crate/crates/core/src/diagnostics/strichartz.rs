use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::fit::{FitModel, ScalingFit};
use super::DEFAULT_DELTA;
use crate::dynamics::{solve_gauged, Scheme, SolverConfig};
use crate::noise_field::GaugeData;
use crate::parallel::map_indexed;
use crate::spectral::{dyadic_levels, lp_block, sobolev_norm, spacetime_norm, wavenumber, GridField};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzParams {
    /// Random profile data; Littlewood–Paley pieces of the first sample are
    /// probed in addition.
    pub sample_count: usize,
    pub r: f64,
    pub q: f64,
    pub delta: f64,
    pub t_final: f64,
    pub dt: f64,
    pub store_stride: usize,
    pub seed: u64,
    /// Amplitude profile `(1+|n|²)^{−s}`.
    pub profile_s: f64,
    /// Data live on `max|nᵢ| ≤ bandlimit`.
    pub bandlimit: usize,
    pub localized: bool,
    pub dealias: bool,
}

impl Default for StrichartzParams {
    fn default() -> Self {
        StrichartzParams {
            sample_count: 4,
            r: 4.0,
            q: 4.0,
            delta: DEFAULT_DELTA,
            t_final: 1.0,
            dt: 2e-3,
            store_stride: 10,
            seed: 0,
            profile_s: 0.75,
            bandlimit: 16,
            localized: true,
            dealias: true,
        }
    }
}

impl StrichartzParams {
    pub fn validate(&self) -> Result<()> {
        let admissible = self.r > 2.0
            && self.q > 2.0
            && self.r.is_finite()
            && self.q.is_finite()
            && (2.0 / self.r + 2.0 / self.q - 1.0).abs() <= 1e-12;
        if !admissible {
            return Err(Error::invalid(format!(
                "(r, q) = ({}, {}) is not admissible: need 2/r + 2/q = 1 with r, q ∈ (2, ∞)",
                self.r, self.q
            )));
        }
        if self.sample_count == 0 && !self.localized {
            return Err(Error::invalid("probe without data"));
        }
        if !(self.delta >= 0.0 && self.t_final > 0.0 && self.dt > 0.0 && self.store_stride > 0) {
            return Err(Error::invalid("probe needs δ ≥ 0, T > 0, dt > 0 and a positive stride"));
        }
        if self.bandlimit == 0 {
            return Err(Error::invalid("probe bandlimit must be ≥ 1"));
        }
        Ok(())
    }

    fn data_index(&self) -> f64 {
        1.0 / self.r + self.delta
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrichartzRow {
    pub epsilon: f64,
    pub max_ratio: f64,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrichartzReport {
    pub params: StrichartzParams,
    pub rows: Vec<StrichartzRow>,
    /// Max ratio against `|log ε|`; absent unless every ε lies in `(0, 1)`
    /// and the ε-grid is strictly decreasing.
    pub fit: Option<ScalingFit>,
}

/// Band-limited field with standard complex Gaussian coefficients times
/// `(1+|n|²)^{−s}` on `0 < max|nᵢ| ≤ bandlimit`.
pub fn random_profile_datum(n: usize, seed: u64, s: f64, bandlimit: usize) -> Result<GridField> {
    let b = bandlimit as i64;
    if b >= (n / 2) as i64 {
        return Err(Error::invalid(format!("bandlimit {bandlimit} too large for an {n}-grid")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n * n];
    for k1 in 0..n {
        let m1 = wavenumber(k1, n);
        for k2 in 0..n {
            let m2 = wavenumber(k2, n);
            if m1.abs() > b || m2.abs() > b || (m1 == 0 && m2 == 0) {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let profile = (1.0 + (m1 * m1 + m2 * m2) as f64).powf(-s);
            coeffs[k1 * n + k2] = Complex64::new(re, im) * (profile * std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    Ok(GridField::from_coefficients(n, coeffs))
}

/// `‖S_ε(t)φ‖_{L^r((0,T); L^q)} / ‖φ‖_{H^{1/r+δ}}`.
pub fn strichartz_ratio(gauge: &GaugeData, phi: &GridField, params: &StrichartzParams) -> Result<f64> {
    params.validate()?;
    let denom = sobolev_norm(phi, params.data_index());
    if denom == 0.0 {
        return Err(Error::invalid("probe datum vanishes"));
    }
    let mut cfg = SolverConfig::new(phi.n(), params.dt, params.t_final, 2.0, Scheme::Rk4Gauged);
    cfg.nonlinearity = 0.0;
    cfg.dealias = params.dealias;
    cfg.store_stride = params.store_stride.min(cfg.step_count().max(1));
    cfg.gammas.clear();
    let traj = solve_gauged(phi, &cfg, gauge)?;
    Ok(spacetime_norm(&traj, params.r, params.q, 0.0)? / denom)
}

fn probe_data(n: usize, params: &StrichartzParams) -> Result<Vec<GridField>> {
    let mut data = (0..params.sample_count)
        .map(|i| random_profile_datum(n, params.seed.wrapping_add(i as u64), params.profile_s, params.bandlimit))
        .collect::<Result<Vec<_>>>()?;
    if params.localized {
        let base = random_profile_datum(n, params.seed, params.profile_s, params.bandlimit)?;
        for m in dyadic_levels(n) {
            let piece = lp_block(&base, m)?;
            if piece.mean_abs2() > 0.0 {
                data.push(piece);
            }
        }
    }
    Ok(data)
}

/// Maximal ratio per gauge over random profile data and their
/// Littlewood–Paley pieces (a sampled stand-in for the supremum over all
/// data). Samples run in parallel; the result does not depend on the pool.
pub fn strichartz_probe(gauges: &[GaugeData], params: &StrichartzParams) -> Result<StrichartzReport> {
    params.validate()?;
    let first = gauges
        .first()
        .ok_or_else(|| Error::invalid("probe needs at least one gauge"))?;
    let n = first.n();
    if gauges.iter().any(|g| g.n() != n) {
        return Err(Error::invalid("probe gauges live on different grids"));
    }
    let data = probe_data(n, params)?;
    let mut rows = Vec::with_capacity(gauges.len());
    for g in gauges {
        let ratios = map_indexed(data.len(), |i| strichartz_ratio(g, &data[i], params))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        rows.push(StrichartzRow {
            epsilon: g.epsilon,
            max_ratio,
            ratios,
        });
    }
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    let maxima: Vec<f64> = rows.iter().map(|r| r.max_ratio).collect();
    let fit = ScalingFit::fit(&eps, &maxima, FitModel::PolyLog).ok();
    Ok(StrichartzReport {
        params: params.clone(),
        rows,
        fit,
    })
}
