use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::Fft2;
use crate::{Error, Result};

/// Signed wavenumber of FFT index `k` on an `n`-point axis. The Nyquist
/// index `n/2` maps to `-n/2`.
#[inline]
pub fn wavenumber(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Complex field sampled at `x_j = 2πj/N`, row-major with the first index
/// along `x₁`. The Fourier view is computed on first use and cached.
#[derive(Clone, Debug)]
pub struct GridField {
    n: usize,
    values: Vec<Complex64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl PartialEq for GridField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.values == other.values
    }
}

impl GridField {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("grid size {n} is not a power of two ≥ 2")));
        }
        if values.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} samples for a {n}×{n} grid, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(GridField {
            n,
            values,
            coeffs: OnceLock::new(),
        })
    }

    pub(crate) fn from_values_unchecked(n: usize, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        GridField {
            n,
            values,
            coeffs: OnceLock::new(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::from_values_unchecked(n, vec![c; n * n])
    }

    /// Samples `f(x₁, x₂)` on the collocation grid.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let h = TAU / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                values.push(f(i1 as f64 * h, i2 as f64 * h));
            }
        }
        Self::from_values_unchecked(n, values)
    }

    pub fn from_real_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(n, |a, b| Complex64::new(f(a, b), 0.0))
    }

    /// Builds the field whose normalized coefficients (FFT index layout) are
    /// `coeffs`.
    pub fn from_coefficients(n: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), n * n);
        let fft = Fft2::shared(n);
        let mut values = coeffs.clone();
        fft.inverse(&mut values, &mut fft.scratch());
        let field = Self::from_values_unchecked(n, values);
        let _ = field.coeffs.set(coeffs);
        field
    }

    /// Trigonometric polynomial `Σ c_m e^{i m·x}` over the listed modes.
    pub fn from_modes(n: usize, modes: &[((i64, i64), Complex64)]) -> Result<Self> {
        let half = (n / 2) as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n * n];
        for &((m1, m2), c) in modes {
            if m1.abs() >= half || m2.abs() >= half {
                return Err(Error::invalid(format!(
                    "mode ({m1},{m2}) not representable below the Nyquist index on a {n}-grid"
                )));
            }
            coeffs[fft_index(m1, n) * n + fft_index(m2, n)] += c;
        }
        Ok(Self::from_coefficients(n, coeffs))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let fft = Fft2::shared(self.n);
            let mut c = self.values.clone();
            fft.forward(&mut c, &mut fft.scratch());
            c
        })
    }

    /// Coefficient of mode `(m₁, m₂)`; modes outside the grid are zero.
    pub fn coefficient(&self, m1: i64, m2: i64) -> Complex64 {
        let half = (self.n / 2) as i64;
        if m1 < -half || m1 >= half || m2 < -half || m2 >= half {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients()[fft_index(m1, self.n) * self.n + fft_index(m2, self.n)]
    }

    pub fn same_grid(&self, other: &GridField) -> Result<()> {
        if self.n != other.n {
            Err(Error::invalid(format!(
                "grid mismatch: {} vs {}",
                self.n, other.n
            )))
        } else {
            Ok(())
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridField {
        Self::from_values_unchecked(self.n, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn zip_with(
        &self,
        other: &GridField,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GridField> {
        self.same_grid(other)?;
        Ok(Self::from_values_unchecked(
            self.n,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: Complex64) -> GridField {
        self.map(|z| z * c)
    }

    /// Applies the Fourier multiplier `symbol(m₁, m₂)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(i64, i64) -> Complex64) -> GridField {
        let n = self.n;
        let mut c = self.coefficients().to_vec();
        for k1 in 0..n {
            let m1 = wavenumber(k1, n);
            for k2 in 0..n {
                c[k1 * n + k2] *= symbol(m1, wavenumber(k2, n));
            }
        }
        Self::from_coefficients(n, c)
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// Grid mean of `|u|²` (the mass under the normalized measure).
    pub fn mean_abs2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// Grid point `(x₁, x₂)` of flat index `idx`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let h = TAU / self.n as f64;
        ((idx / self.n) as f64 * h, (idx % self.n) as f64 * h)
    }
}

#[inline]
pub(crate) fn fft_index(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> GridField {
        GridField::from_fn(n, |a, b| {
            Complex64::new((a + 2.0 * b).sin() + 0.3 * (3.0 * a).cos(), (b - a).cos() * 0.5)
        })
    }

    #[test]
    fn wavenumbers() {
        assert_eq!(wavenumber(0, 8), 0);
        assert_eq!(wavenumber(3, 8), 3);
        assert_eq!(wavenumber(4, 8), -4);
        assert_eq!(wavenumber(7, 8), -1);
    }

    #[test]
    fn round_trip_and_parseval() {
        let f = sample(32);
        let back = GridField::from_coefficients(32, f.coefficients().to_vec());
        let scale = f.max_abs();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
        let spectral: f64 = f.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert!((spectral - f.mean_abs2()).abs() <= 1e-12 * f.mean_abs2());
    }

    #[test]
    fn single_mode_coefficient() {
        let f = GridField::from_modes(16, &[((3, -2), Complex64::new(2.0, 1.0))]).unwrap();
        assert!((f.coefficient(3, -2) - Complex64::new(2.0, 1.0)).norm() < 1e-14);
        let (x1, x2) = f.point(5 * 16 + 7);
        let expect = Complex64::new(2.0, 1.0) * Complex64::from_polar(1.0, 3.0 * x1 - 2.0 * x2);
        assert!((f.values()[5 * 16 + 7] - expect).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GridField::new(6, vec![Complex64::new(0.0, 0.0); 36]).is_err());
        assert!(GridField::new(8, vec![Complex64::new(0.0, 0.0); 63]).is_err());
        assert!(GridField::from_modes(8, &[((4, 0), Complex64::new(1.0, 0.0))]).is_err());
        assert!(sample(8).same_grid(&sample(16)).is_err());
    }
}
