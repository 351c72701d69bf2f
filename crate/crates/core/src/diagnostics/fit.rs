use serde::Serialize;

use crate::{Error, Result};

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LinearFit {
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::invalid(format!(
                "linear fit needs ≥ 2 paired points (got {} and {})",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::invalid("linear fit on non-finite data"));
        }
        let m = x.len() as f64;
        let mx = x.iter().sum::<f64>() / m;
        let my = y.iter().sum::<f64>() / m;
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        if sxx == 0.0 {
            return Err(Error::invalid("linear fit with a degenerate abscissa"));
        }
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let r = b - (slope * a + intercept);
                r * r
            })
            .sum();
        // A flat series fitted exactly has nothing left to explain.
        let scale = y.iter().map(|b| b * b).sum::<f64>().max(f64::MIN_POSITIVE);
        let r_squared = if ss_tot <= 1e-24 * scale {
            if ss_res <= 1e-24 * scale {
                1.0
            } else {
                0.0
            }
        } else {
            (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
        };
        Ok(LinearFit {
            slope,
            intercept,
            r_squared,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// Expected bounded: `value ≲ C`.
    Constant,
    /// `value ≈ C |log ε|^a`, nominally `a = 1`.
    PolyLog,
    /// `value ≈ C |log ε|^a`, nominally `a = 2`.
    PolyLogSquared,
    /// `value ≈ C ε^a`.
    PowerLaw,
}

impl FitModel {
    /// Exponent of the bound the measurement is compared against.
    pub fn nominal_exponent(self) -> Option<f64> {
        match self {
            FitModel::Constant => Some(0.0),
            FitModel::PolyLog => Some(1.0),
            FitModel::PolyLogSquared => Some(2.0),
            FitModel::PowerLaw => None,
        }
    }

    fn abscissa(self, eps: f64) -> f64 {
        match self {
            FitModel::PowerLaw => eps.ln(),
            _ => eps.ln().abs().ln(),
        }
    }
}

/// Fit of measured values against ε in the model's linearizing
/// coordinates: `(log|log ε|, log value)` for the poly-log models and
/// `(log ε, log value)` for the power law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub model: FitModel,
    pub fitted_constant: f64,
    pub fitted_exponent: f64,
    pub r_squared: f64,
    /// `max_k value_k / |log ε_k|^a` with `a` the nominal exponent (the
    /// fitted one for the power law): the smallest constant for which the
    /// bound holds on the sample.
    pub envelope_constant: f64,
}

impl ScalingFit {
    pub fn fit(epsilons: &[f64], values: &[f64], model: FitModel) -> Result<Self> {
        if epsilons.len() != values.len() || epsilons.len() < 2 {
            return Err(Error::invalid("scaling fit needs ≥ 2 paired points"));
        }
        if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::invalid("scaling fit needs ε ∈ (0, 1)"));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("scaling fit needs strictly decreasing ε"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("scaling fit needs finite nonnegative values"));
        }
        let (fitted_constant, fitted_exponent, r_squared) = if values.iter().all(|&v| v == 0.0) {
            (0.0, 0.0, 1.0)
        } else if values.iter().any(|&v| v == 0.0) {
            return Err(Error::invalid("scaling fit on partly vanishing values"));
        } else {
            let x: Vec<f64> = epsilons.iter().map(|&e| model.abscissa(e)).collect();
            let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            let lf = LinearFit::fit(&x, &y)?;
            (lf.intercept.exp(), lf.slope, lf.r_squared)
        };
        let a = model.nominal_exponent().unwrap_or(fitted_exponent);
        let envelope_constant = epsilons
            .iter()
            .zip(values)
            .map(|(&e, &v)| match model {
                FitModel::PowerLaw => v / e.powf(a),
                _ => v / e.ln().abs().powf(a),
            })
            .fold(0.0, f64::max);
        Ok(ScalingFit {
            epsilons: epsilons.to_vec(),
            values: values.to_vec(),
            model,
            fitted_constant,
            fitted_exponent,
            r_squared,
            envelope_constant,
        })
    }
}

/// Fits `sup_t ‖v_ε‖_{H²}` against `|log ε|^c`; needs at least four ε.
pub fn h2_growth_fit(epsilons: &[f64], h2_sups: &[f64]) -> Result<ScalingFit> {
    if epsilons.len() < 4 {
        return Err(Error::invalid(format!(
            "H² growth fit needs ≥ 4 values of ε, got {}",
            epsilons.len()
        )));
    }
    ScalingFit::fit(epsilons, h2_sups, FitModel::PolyLog)
}
