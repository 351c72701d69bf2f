use crate::noise_field::GaugeData;
use crate::spectral::{wavenumber, GridField};

/// `E(u) = ½⟨|∇u|²⟩ − ½⟨ξ|u|²⟩ + λ/(p+2)⟨|u|^{p+2}⟩`, `⟨·⟩` the grid mean.
/// Conserved by `i∂ₜu = Δu + ξu − λu|u|^p`.
pub fn physical_energy(u: &GridField, xi: &GridField, p: f64, lambda: f64) -> f64 {
    let n = u.n();
    let c = u.coefficients();
    let mut kinetic = 0.0;
    for k1 in 0..n {
        let m1 = wavenumber(k1, n) as f64;
        for k2 in 0..n {
            let m2 = wavenumber(k2, n) as f64;
            kinetic += (m1 * m1 + m2 * m2) * c[k1 * n + k2].norm_sqr();
        }
    }
    let count = (n * n) as f64;
    let mut potential = 0.0;
    let mut interaction = 0.0;
    for (z, x) in u.values().iter().zip(xi.values()) {
        let a2 = z.norm_sqr();
        potential += x.re * a2;
        if lambda != 0.0 {
            interaction += a2.powf(0.5 * p + 1.0);
        }
    }
    0.5 * kinetic - 0.5 * potential / count + lambda / (p + 2.0) * interaction / count
}

/// `⟨e^{−2Y_ε}|v|²⟩`, the mass of `u` seen through the gauge.
pub fn weighted_mass(v: &GridField, gauge: &GaugeData) -> f64 {
    v.values()
        .iter()
        .zip(gauge.exp_neg_y())
        .map(|(z, e)| e * e * z.norm_sqr())
        .sum::<f64>()
        / v.values().len() as f64
}
