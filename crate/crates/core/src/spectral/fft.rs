use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned forward/inverse 2D transform for square N×N row-major data.
///
/// Rows are transformed in one batched call, the matrix is transposed in
/// place, rows are transformed again and the transpose is undone. A single
/// transform is single-threaded and bitwise reproducible.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Fft2 {
            n,
            forward,
            inverse,
            scratch_len,
        }
    }

    /// Process-wide plan cache keyed by grid size.
    pub fn shared(n: usize) -> Arc<Fft2> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft2>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Fft2::new(n)))
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.scratch_len]
    }

    /// Grid values to normalized Fourier coefficients, in place.
    pub fn forward(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.apply(&*self.forward, data, scratch);
        let scale = 1.0 / (self.n * self.n) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    /// Normalized Fourier coefficients to grid values, in place.
    pub fn inverse(&self, data: &mut [Complex64], scratch: &mut [Complex64]) {
        self.apply(&*self.inverse, data, scratch);
    }

    fn apply(&self, plan: &dyn Fft<f64>, data: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "Fft2: buffer is not {n}×{n}");
        assert!(scratch.len() >= self.scratch_len, "Fft2: scratch too small");
        let scratch = &mut scratch[..self.scratch_len];
        plan.process_with_scratch(data, scratch);
        transpose_in_place(data, n);
        plan.process_with_scratch(data, scratch);
        transpose_in_place(data, n);
    }
}

fn transpose_in_place(data: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for bi in (0..n).step_by(BLOCK) {
        for bj in (bi..n).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + BLOCK).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_is_an_involution_and_correct() {
        for n in [1usize, 2, 5, 16, 33] {
            let orig: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(k as f64, 0.0)).collect();
            let mut t = orig.clone();
            transpose_in_place(&mut t, n);
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(t[i * n + j], orig[j * n + i]);
                }
            }
            transpose_in_place(&mut t, n);
            assert_eq!(t, orig);
        }
    }

    #[test]
    fn matches_naive_dft() {
        let n = 8;
        let fft = Fft2::new(n);
        let data: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let mut out = data.clone();
        let mut scratch = fft.scratch();
        fft.forward(&mut out, &mut scratch);
        let tau = std::f64::consts::TAU;
        for k1 in 0..n {
            for k2 in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j1 in 0..n {
                    for j2 in 0..n {
                        let phase = -tau * ((k1 * j1 + k2 * j2) as f64) / n as f64;
                        acc += data[j1 * n + j2] * Complex64::from_polar(1.0, phase);
                    }
                }
                acc /= (n * n) as f64;
                assert!((acc - out[k1 * n + k2]).norm() < 1e-13);
            }
        }
    }
}
