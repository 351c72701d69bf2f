use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Gaussian Fourier coefficients `g_n` of the white noise on the square
/// lattice `max(|n₁|, |n₂|) ≤ K`, with `g_{-n} = conj(g_n)` and `g_0 = 0`.
///
/// Every mode draws from its own ChaCha stream keyed by `(seed, n)`, so a
/// larger lattice extends a smaller one without touching shared modes.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRealization {
    pub seed: u64,
    halfwidth: usize,
    /// Multiplies every standard coefficient; `E|g_n|² = amplitude²`.
    pub amplitude: f64,
    coeffs: Vec<Complex64>,
}

impl NoiseRealization {
    /// The all-zero realization of the unit-variance law: every field built
    /// from it vanishes, while `C_ε` (a property of the law) does not.
    /// Scale with `amplitude = 0` for a noise that is zero in law.
    pub fn zero(halfwidth: usize) -> Result<Self> {
        check_halfwidth(halfwidth as i64)?;
        let side = 2 * halfwidth + 1;
        Ok(NoiseRealization {
            seed: 0,
            halfwidth,
            amplitude: 1.0,
            coeffs: vec![Complex64::new(0.0, 0.0); side * side],
        })
    }

    /// Wraps externally supplied coefficients (row-major over `n₁, n₂ ∈
    /// [-K, K]`) after checking the symmetry and zero-mean invariants.
    pub fn from_coefficients(
        seed: u64,
        halfwidth: usize,
        amplitude: f64,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        check_halfwidth(halfwidth as i64)?;
        let side = 2 * halfwidth + 1;
        if coeffs.len() != side * side {
            return Err(Error::invalid(format!(
                "expected {} coefficients for K = {halfwidth}, got {}",
                side * side,
                coeffs.len()
            )));
        }
        let noise = NoiseRealization {
            seed,
            halfwidth,
            amplitude,
            coeffs,
        };
        noise.check_invariants()?;
        Ok(noise)
    }

    /// Same realization with a single excited pair `g_m = c`, `g_{-m} = c̄`
    /// and everything else zero.
    pub fn single_pair(halfwidth: usize, m: (i64, i64), c: Complex64) -> Result<Self> {
        let mut noise = Self::zero(halfwidth)?;
        let k = halfwidth as i64;
        if m == (0, 0) || m.0.abs() > k || m.1.abs() > k {
            return Err(Error::invalid(format!("mode {m:?} not on the K = {k} lattice")));
        }
        let i = noise.index(m.0, m.1);
        let j = noise.index(-m.0, -m.1);
        noise.coeffs[i] = c;
        noise.coeffs[j] = c.conj();
        Ok(noise)
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    fn index(&self, n1: i64, n2: i64) -> usize {
        let k = self.halfwidth as i64;
        let side = 2 * k + 1;
        ((n1 + k) * side + (n2 + k)) as usize
    }

    /// `g_n`; zero outside the lattice.
    #[inline]
    pub fn g(&self, n1: i64, n2: i64) -> Complex64 {
        let k = self.halfwidth as i64;
        if n1.abs() > k || n2.abs() > k {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.index(n1, n2)]
        }
    }

    /// Restriction to the sub-lattice of half-width `k ≤ K`.
    pub fn restrict(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.halfwidth {
            return Err(Error::invalid(format!(
                "cannot restrict K = {} to {k}",
                self.halfwidth
            )));
        }
        let ki = k as i64;
        let mut coeffs = Vec::with_capacity((2 * k + 1) * (2 * k + 1));
        for n1 in -ki..=ki {
            for n2 in -ki..=ki {
                coeffs.push(self.g(n1, n2));
            }
        }
        Ok(NoiseRealization {
            seed: self.seed,
            halfwidth: k,
            amplitude: self.amplitude,
            coeffs,
        })
    }

    pub fn check_invariants(&self) -> Result<()> {
        let k = self.halfwidth as i64;
        if self.g(0, 0) != Complex64::new(0.0, 0.0) {
            return Err(Error::invalid("g_0 must vanish"));
        }
        for n1 in -k..=k {
            for n2 in -k..=k {
                if self.g(n1, n2) != self.g(-n1, -n2).conj() {
                    return Err(Error::invalid(format!(
                        "conjugation symmetry broken at ({n1},{n2})"
                    )));
                }
            }
        }
        if self.coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("non-finite noise coefficient"));
        }
        Ok(())
    }
}

fn check_halfwidth(k: i64) -> Result<()> {
    if k <= 0 {
        return Err(Error::invalid(format!("lattice half-width must be ≥ 1, got {k}")));
    }
    if k > 1 << 14 {
        return Err(Error::invalid(format!("lattice half-width {k} too large")));
    }
    Ok(())
}

/// Representative of `{n, -n}`: `n₂ > 0`, or `n₂ = 0` and `n₁ > 0`.
#[inline]
fn is_canonical(n1: i64, n2: i64) -> bool {
    n2 > 0 || (n2 == 0 && n1 > 0)
}

#[inline]
fn stream_id(n1: i64, n2: i64) -> u64 {
    ((n1 as i32 as u32 as u64) << 32) | (n2 as i32 as u32 as u64)
}

fn standard_complex_gaussian(seed: u64, n1: i64, n2: i64) -> Complex64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(n1, n2));
    let re: f64 = StandardNormal.sample(&mut rng);
    let im: f64 = StandardNormal.sample(&mut rng);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Standard complex Gaussians (`E|g_n|² = 1`) on `max|nᵢ| ≤ K`.
pub fn sample_noise(seed: u64, halfwidth: i64) -> Result<NoiseRealization> {
    sample_noise_scaled(seed, halfwidth, 1.0)
}

/// As [`sample_noise`] with every coefficient multiplied by `amplitude`.
pub fn sample_noise_scaled(seed: u64, halfwidth: i64, amplitude: f64) -> Result<NoiseRealization> {
    check_halfwidth(halfwidth)?;
    if !(amplitude.is_finite() && amplitude >= 0.0) {
        return Err(Error::invalid(format!("noise amplitude {amplitude} must be finite and ≥ 0")));
    }
    let k = halfwidth as usize;
    let mut noise = NoiseRealization::zero(k)?;
    noise.seed = seed;
    noise.amplitude = amplitude;
    for n1 in -halfwidth..=halfwidth {
        for n2 in -halfwidth..=halfwidth {
            if !is_canonical(n1, n2) {
                continue;
            }
            let g = standard_complex_gaussian(seed, n1, n2) * amplitude;
            let i = noise.index(n1, n2);
            let j = noise.index(-n1, -n2);
            noise.coeffs[i] = g;
            noise.coeffs[j] = g.conj();
        }
    }
    Ok(noise)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_symmetric() {
        let a = sample_noise(42, 4).unwrap();
        let b = sample_noise(42, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.g(1, 2), a.g(-1, -2).conj());
        assert_eq!(a.g(0, 0), Complex64::new(0.0, 0.0));
        a.check_invariants().unwrap();
        assert_ne!(a, sample_noise(43, 4).unwrap());
    }

    #[test]
    fn nested_lattices_agree() {
        let small = sample_noise(7, 3).unwrap();
        let big = sample_noise(7, 11).unwrap();
        assert_eq!(big.restrict(3).unwrap(), small);
    }

    #[test]
    fn rejects_empty_lattice() {
        assert!(matches!(sample_noise(1, 0), Err(Error::InvalidArgument(_))));
        assert!(sample_noise(1, -3).is_err());
        assert!(sample_noise_scaled(1, 2, f64::NAN).is_err());
    }

    #[test]
    fn unit_variance_over_seeds() {
        // |g|² of a standard complex Gaussian is Exp(1): mean 1, sd 1, so the
        // 10⁴-sample mean has sd 0.01 and the ±0.03 band is 3σ.
        let m = 10_000;
        let mean: f64 = (0..m)
            .map(|s| sample_noise(s as u64, 1).unwrap().g(1, 0).norm_sqr())
            .sum::<f64>()
            / m as f64;
        assert!((0.97..=1.03).contains(&mean), "mean |g|² = {mean}");
    }

    #[test]
    fn from_coefficients_validates() {
        let a = sample_noise(3, 2).unwrap();
        let mut c = a.coefficients().to_vec();
        assert!(NoiseRealization::from_coefficients(3, 2, 1.0, c.clone()).is_ok());
        c[0] += Complex64::new(0.1, 0.0);
        assert!(NoiseRealization::from_coefficients(3, 2, 1.0, c).is_err());
    }
}
