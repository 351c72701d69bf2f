use num_complex::Complex64;

use super::{MollifierSpec, NoiseRealization};
use crate::spectral::{wavenumber, GridField};
use crate::{Error, Result};

/// Largest lattice half-width carried by an `n`-grid: the Nyquist row and
/// column are excluded so conjugate pairs never collide.
pub fn grid_lattice_halfwidth(n: usize) -> usize {
    n / 2 - 1
}

/// `Σ_{0 < max|nᵢ| ≤ K} χ̂(εn)² / |n|²` for unit-variance coefficients.
///
/// This is `E|∇Y_ε(x)|²` for the field sampled on the same lattice, at every
/// `x`.
pub fn renormalization_constant(spec: &MollifierSpec, halfwidth: usize) -> f64 {
    let k = halfwidth as i64;
    let mut acc = 0.0;
    // One quadrant plus the positive n₁ axis, times four.
    for n1 in 1..=k {
        for n2 in 0..=k {
            let s = spec.symbol(n1, n2);
            acc += s * s / (n1 * n1 + n2 * n2) as f64;
        }
    }
    4.0 * acc
}

/// Gauge potential and renormalized quantities for one `(noise, ε)` pair on
/// an N×N grid.
#[derive(Clone, Debug)]
pub struct GaugeData {
    pub epsilon: f64,
    /// `Y_ε = Δ⁻¹ξ_ε` (real up to roundoff).
    pub y: GridField,
    pub grad_y: [GridField; 2],
    /// `:|∇Y_ε|²: = |∇Y_ε|² − C_ε`.
    pub wick: GridField,
    /// The mollified noise `ξ_ε = ΔY_ε`.
    pub xi: GridField,
    pub c_eps: f64,
    /// Half-width `K` of the noise lattice the fields were built from.
    pub lattice: usize,
    exp_y: Vec<f64>,
    exp_neg_y: Vec<f64>,
}

impl GaugeData {
    /// Trivial gauge: all fields zero and `C = 0`.
    pub fn zero(n: usize) -> Self {
        let z = GridField::zeros(n);
        GaugeData {
            epsilon: 0.0,
            y: z.clone(),
            grad_y: [z.clone(), z.clone()],
            wick: z.clone(),
            xi: z,
            c_eps: 0.0,
            lattice: 0,
            exp_y: vec![1.0; n * n],
            exp_neg_y: vec![1.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.y.n()
    }

    /// Pointwise `e^{Y_ε}`.
    pub fn exp_y(&self) -> &[f64] {
        &self.exp_y
    }

    /// Pointwise `e^{−Y_ε}`.
    pub fn exp_neg_y(&self) -> &[f64] {
        &self.exp_neg_y
    }

    pub fn check_grid(&self, f: &GridField) -> Result<()> {
        if f.n() != self.n() {
            return Err(Error::invalid(format!(
                "field on a {}-grid, gauge on a {}-grid",
                f.n(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Rebuilds the derived fields after `y`/`grad_y`/`xi` are set.
    fn from_parts(
        epsilon: f64,
        y: GridField,
        grad_y: [GridField; 2],
        xi: GridField,
        c_eps: f64,
        lattice: usize,
    ) -> Self {
        let n = y.n();
        let wick_vals: Vec<Complex64> = grad_y[0]
            .values()
            .iter()
            .zip(grad_y[1].values())
            .map(|(a, b)| Complex64::new(a.re * a.re + b.re * b.re - c_eps, 0.0))
            .collect();
        let wick = GridField::new(n, wick_vals).expect("same grid");
        let exp_y: Vec<f64> = y.values().iter().map(|z| z.re.exp()).collect();
        let exp_neg_y: Vec<f64> = y.values().iter().map(|z| (-z.re).exp()).collect();
        GaugeData {
            epsilon,
            y,
            grad_y,
            wick,
            xi,
            c_eps,
            lattice,
            exp_y,
            exp_neg_y,
        }
    }
}

/// `Ŷ_ε(n) = −χ̂(εn) g_n / |n|²` on the grid lattice `max|nᵢ| ≤ N/2 − 1`,
/// gradients by the multiplier `i n`, and `C_ε` from the same lattice
/// (scaled by the noise variance).
pub fn build_gauge_data(noise: &NoiseRealization, spec: &MollifierSpec, n: usize) -> Result<GaugeData> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("grid size {n} must be a power of two ≥ 4")));
    }
    build_gauge_data_on_lattice(noise, spec, n, grid_lattice_halfwidth(n))
}

/// As [`build_gauge_data`] with the noise cut to `max|nᵢ| ≤ k`. A lattice
/// well inside the grid (e.g. `k = N/4`) keeps products such as `e^{±Y}v`
/// resolved; `C_ε` is the sum over the same lattice.
pub fn build_gauge_data_on_lattice(
    noise: &NoiseRealization,
    spec: &MollifierSpec,
    n: usize,
    k: usize,
) -> Result<GaugeData> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("grid size {n} must be a power of two ≥ 4")));
    }
    if k == 0 || k > grid_lattice_halfwidth(n) {
        return Err(Error::invalid(format!(
            "lattice half-width {k} must lie in 1..={} on an {n}-grid",
            grid_lattice_halfwidth(n)
        )));
    }
    if noise.halfwidth() < k {
        return Err(Error::invalid(format!(
            "noise lattice K = {} does not cover the requested K = {k}",
            noise.halfwidth()
        )));
    }
    let ki = k as i64;
    let zero = Complex64::new(0.0, 0.0);
    let mut y_hat = vec![zero; n * n];
    let mut d1_hat = vec![zero; n * n];
    let mut d2_hat = vec![zero; n * n];
    let mut xi_hat = vec![zero; n * n];
    for k1 in 0..n {
        let m1 = wavenumber(k1, n);
        if m1.abs() > ki {
            continue;
        }
        for k2 in 0..n {
            let m2 = wavenumber(k2, n);
            if m2.abs() > ki || (m1 == 0 && m2 == 0) {
                continue;
            }
            let xi = noise.g(m1, m2) * spec.symbol(m1, m2);
            let y = -xi / (m1 * m1 + m2 * m2) as f64;
            let idx = k1 * n + k2;
            xi_hat[idx] = xi;
            y_hat[idx] = y;
            d1_hat[idx] = Complex64::new(0.0, m1 as f64) * y;
            d2_hat[idx] = Complex64::new(0.0, m2 as f64) * y;
        }
    }
    let y = GridField::from_coefficients(n, y_hat);
    let d1 = GridField::from_coefficients(n, d1_hat);
    let d2 = GridField::from_coefficients(n, d2_hat);
    let xi = GridField::from_coefficients(n, xi_hat);
    let c_eps = noise.amplitude * noise.amplitude * renormalization_constant(spec, k);
    Ok(GaugeData::from_parts(spec.epsilon, y, [d1, d2], xi, c_eps, k))
}
