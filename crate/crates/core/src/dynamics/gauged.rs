use std::sync::Arc;

use num_complex::Complex64;

use super::config::BLOWUP_THRESHOLD;
use super::physical::free_multiplier;
use super::trajectory::NormContext;
use super::{Scheme, SolverConfig, Trajectory, Variable};
use crate::noise_field::GaugeData;
use crate::spectral::{wavenumber, Fft2, GridField};
use crate::{Error, Result};

/// Pseudo-spectral evaluation of the non-Laplacian part of the gauged
/// equation,
/// `R(v) = −2∇v·∇Y_ε + v (:|∇Y_ε|²: − w̄) − λ e^{−pY_ε} v|v|^p`,
/// where `w̄` is the spatial mean of the Wick square; the constant part
/// `w̄ v` is left to the integrating factor. Owned work buffers keep the
/// time loop allocation-free.
pub struct GaugedOperator {
    n: usize,
    fft: Arc<Fft2>,
    scratch: Vec<Complex64>,
    grad: [Vec<f64>; 2],
    wick: Vec<f64>,
    shift: f64,
    damping: Vec<f64>,
    wave: [Vec<f64>; 2],
    keep: Option<Vec<bool>>,
    half_p: f64,
    lambda: f64,
    v: Vec<Complex64>,
    g1: Vec<Complex64>,
    g2: Vec<Complex64>,
}

impl GaugedOperator {
    pub fn new(gauge: &GaugeData, p: f64, lambda: f64, dealias: bool) -> Self {
        let n = gauge.n();
        let fft = Fft2::shared(n);
        let scratch = fft.scratch();
        let re = |f: &GridField| f.values().iter().map(|z| z.re).collect::<Vec<f64>>();
        let damping = if lambda != 0.0 {
            gauge.y.values().iter().map(|z| (-p * z.re).exp()).collect()
        } else {
            vec![0.0; n * n]
        };
        let mut w1 = Vec::with_capacity(n * n);
        let mut w2 = Vec::with_capacity(n * n);
        let cut = (n / 3) as i64;
        let mut keep = Vec::with_capacity(n * n);
        for k1 in 0..n {
            let m1 = wavenumber(k1, n);
            for k2 in 0..n {
                let m2 = wavenumber(k2, n);
                w1.push(m1 as f64);
                w2.push(m2 as f64);
                keep.push(m1.abs() <= cut && m2.abs() <= cut);
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut wick = re(&gauge.wick);
        let shift = wick.iter().sum::<f64>() / wick.len() as f64;
        wick.iter_mut().for_each(|w| *w -= shift);
        GaugedOperator {
            n,
            fft,
            scratch,
            grad: [re(&gauge.grad_y[0]), re(&gauge.grad_y[1])],
            wick,
            shift,
            damping,
            wave: [w1, w2],
            keep: dealias.then_some(keep),
            half_p: 0.5 * p,
            lambda,
            v: vec![zero; n * n],
            g1: vec![zero; n * n],
            g2: vec![zero; n * n],
        }
    }

    /// Spatial mean of the Wick square.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Writes `R̂(v)` into `out` given `v̂`; returns `max |v|²` on the grid
    /// (NaN if any sample is non-finite).
    pub fn remainder_hat(&mut self, v_hat: &[Complex64], out: &mut [Complex64]) -> f64 {
        let i = Complex64::new(0.0, 1.0);
        for (((v, g1), g2), ((c, m1), m2)) in self
            .v
            .iter_mut()
            .zip(self.g1.iter_mut())
            .zip(self.g2.iter_mut())
            .zip(v_hat.iter().zip(&self.wave[0]).zip(&self.wave[1]))
        {
            *v = *c;
            *g1 = i * *m1 * *c;
            *g2 = i * *m2 * *c;
        }
        self.fft.inverse(&mut self.v, &mut self.scratch);
        self.fft.inverse(&mut self.g1, &mut self.scratch);
        self.fft.inverse(&mut self.g2, &mut self.scratch);

        let mut peak = 0.0f64;
        for j in 0..self.n * self.n {
            let v = self.v[j];
            let a2 = v.norm_sqr();
            if !a2.is_finite() {
                peak = f64::NAN;
            } else {
                peak = peak.max(a2);
            }
            let mut r = -2.0 * (self.g1[j] * self.grad[0][j] + self.g2[j] * self.grad[1][j])
                + v * self.wick[j];
            if self.lambda != 0.0 {
                r -= v * (self.lambda * self.damping[j] * a2.powf(self.half_p));
            }
            out[j] = r;
        }
        self.fft.forward(out, &mut self.scratch);
        if let Some(keep) = &self.keep {
            for (c, &k) in out.iter_mut().zip(keep) {
                if !k {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
        peak
    }

    /// `H_ε v = Δv − 2∇v·∇Y_ε + v :|∇Y_ε|²:` (the λ term is not included).
    pub fn apply_linear(&mut self, v: &GridField) -> GridField {
        let lambda = std::mem::replace(&mut self.lambda, 0.0);
        let v_hat = v.coefficients();
        let mut out = vec![Complex64::new(0.0, 0.0); self.n * self.n];
        self.remainder_hat(v_hat, &mut out);
        self.lambda = lambda;
        for ((o, c), (m1, m2)) in out
            .iter_mut()
            .zip(v_hat)
            .zip(self.wave[0].iter().zip(&self.wave[1]))
        {
            *o += (self.shift - m1 * m1 - m2 * m2) * *c;
        }
        GridField::from_coefficients(self.n, out)
    }
}

/// `H_ε v` evaluated pseudo-spectrally, optionally with 2/3-rule truncation
/// of the product terms.
pub fn apply_h_epsilon(v: &GridField, gauge: &GaugeData, dealias: bool) -> Result<GridField> {
    gauge.check_grid(v)?;
    Ok(GaugedOperator::new(gauge, 2.0, 0.0, dealias).apply_linear(v))
}

/// Integrating-factor RK4 for `i∂ₜv = Δv + w̄v + R(v)`: the Laplacian and
/// the mean potential are absorbed exactly by `e^{i(|n|² − w̄)t}` and the
/// classical RK4 stages act on `−iR̂`.
pub fn solve_gauged(v0: &GridField, cfg: &SolverConfig, gauge: &GaugeData) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.scheme != Scheme::Rk4Gauged {
        return Err(Error::invalid("solve_gauged needs the rk4_gauged scheme"));
    }
    gauge.check_grid(v0)?;
    if v0.n() != cfg.n {
        return Err(Error::invalid(format!(
            "datum on a {}-grid, config says {}",
            v0.n(),
            cfg.n
        )));
    }
    let n = cfg.n;
    let h = cfg.signed_dt();
    let mut op = GaugedOperator::new(gauge, cfg.p, cfg.nonlinearity, cfg.dealias);
    let turn = |t: f64| {
        let phase = Complex64::from_polar(1.0, -op.shift() * t);
        let mut m = free_multiplier(n, t);
        m.iter_mut().for_each(|z| *z *= phase);
        m
    };
    let e_half = turn(0.5 * h);
    let e_full = turn(h);
    let fft = Fft2::shared(n);
    let mut scratch = fft.scratch();
    let limit = BLOWUP_THRESHOLD * BLOWUP_THRESHOLD;
    let minus_i = Complex64::new(0.0, -1.0);

    let zero = Complex64::new(0.0, 0.0);
    let mut v_hat = v0.coefficients().to_vec();
    let mut k1 = vec![zero; n * n];
    let mut k2 = vec![zero; n * n];
    let mut k3 = vec![zero; n * n];
    let mut k4 = vec![zero; n * n];
    let mut stage = vec![zero; n * n];

    let blocks = cfg.frame_count() - 1;
    let mut times = Vec::with_capacity(blocks + 1);
    let mut frames = Vec::with_capacity(blocks + 1);
    times.push(0.0);
    frames.push(v0.clone());

    let mut step = 0usize;
    for b in 0..blocks {
        for _ in 0..cfg.store_stride {
            let peak = op.remainder_hat(&v_hat, &mut k1);
            if peak.is_nan() || peak > limit {
                return Err(Error::BlowUp {
                    time: step as f64 * h,
                    step,
                });
            }
            k1.iter_mut().for_each(|z| *z *= minus_i);

            for j in 0..n * n {
                stage[j] = e_half[j] * (v_hat[j] + 0.5 * h * k1[j]);
            }
            op.remainder_hat(&stage, &mut k2);
            k2.iter_mut().for_each(|z| *z *= minus_i);

            for j in 0..n * n {
                stage[j] = e_half[j] * v_hat[j] + 0.5 * h * k2[j];
            }
            op.remainder_hat(&stage, &mut k3);
            k3.iter_mut().for_each(|z| *z *= minus_i);

            for j in 0..n * n {
                stage[j] = e_full[j] * v_hat[j] + h * e_half[j] * k3[j];
            }
            op.remainder_hat(&stage, &mut k4);
            k4.iter_mut().for_each(|z| *z *= minus_i);

            for j in 0..n * n {
                v_hat[j] = e_full[j] * v_hat[j]
                    + h / 6.0
                        * (e_full[j] * k1[j] + 2.0 * e_half[j] * (k2[j] + k3[j]) + k4[j]);
            }
            step += 1;
        }
        let mut v = v_hat.clone();
        fft.inverse(&mut v, &mut scratch);
        let frame = GridField::new(n, v)?;
        if !frame.max_abs().is_finite() || frame.max_abs() > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp {
                time: step as f64 * h,
                step,
            });
        }
        times.push(((b + 1) * cfg.store_stride) as f64 * h);
        frames.push(frame);
    }
    Trajectory::assemble(
        cfg.clone(),
        times,
        frames,
        Variable::Gauged,
        NormContext::Gauged { gauge },
    )
}

/// `S_ε(t)φ`: the linear gauged flow at time `t ≥ 0` with step at most `dt`.
pub fn linear_propagator(phi: &GridField, t: f64, gauge: &GaugeData, dt: f64) -> Result<GridField> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(format!("propagator time {t} must be ≥ 0")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!("dt = {dt} must be positive")));
    }
    gauge.check_grid(phi)?;
    if t == 0.0 {
        return Ok(phi.clone());
    }
    let steps = (t / dt).ceil().max(1.0) as usize;
    let mut cfg = SolverConfig::new(phi.n(), t / steps as f64, t, 2.0, Scheme::Rk4Gauged);
    cfg.nonlinearity = 0.0;
    cfg.store_stride = steps;
    cfg.gammas.clear();
    let traj = solve_gauged(phi, &cfg, gauge)?;
    Ok(traj.last().clone())
}
