use num_complex::Complex64;

use super::config::BLOWUP_THRESHOLD;
use super::trajectory::NormContext;
use super::{Scheme, SolverConfig, Trajectory, Variable};
use crate::spectral::{wavenumber, Fft2, GridField};
use crate::{Error, Result};

/// `u ← u·exp(−iτ(ξ − λ|u|^p))`. Exact: the multiplier is unimodular so
/// `|u|` does not change during the substep. Returns `max |u|²`, or NaN if
/// any sample is non-finite.
fn phase_step(u: &mut [Complex64], xi: &[f64], tau: f64, p: f64, lambda: f64) -> f64 {
    let half_p = 0.5 * p;
    let mut peak = 0.0f64;
    for (z, &x) in u.iter_mut().zip(xi) {
        let a2 = z.norm_sqr();
        if !a2.is_finite() {
            return f64::NAN;
        }
        peak = peak.max(a2);
        let nl = if lambda != 0.0 { lambda * a2.powf(half_p) } else { 0.0 };
        let (s, c) = (-tau * (x - nl)).sin_cos();
        *z *= Complex64::new(c, s);
    }
    peak
}

pub(crate) fn free_multiplier(n: usize, h: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n * n);
    for k1 in 0..n {
        let m1 = wavenumber(k1, n) as f64;
        for k2 in 0..n {
            let m2 = wavenumber(k2, n) as f64;
            let (s, c) = ((m1 * m1 + m2 * m2) * h).sin_cos();
            out.push(Complex64::new(c, s));
        }
    }
    out
}

/// Strang split-step for `i∂ₜu = Δu + ξ_ε u − λu|u|^p`:
/// half pointwise phase, exact free flow `û(n) ← e^{i|n|²dt} û(n)`, half
/// phase. Consecutive half phases inside a storage block are fused into one
/// full phase (exact, since `|u|` is invariant under the phase).
pub fn solve_physical(u0: &GridField, cfg: &SolverConfig, xi_eps: &GridField) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.scheme != Scheme::StrangPhysical {
        return Err(Error::invalid("solve_physical needs the strang_physical scheme"));
    }
    if u0.n() != cfg.n || xi_eps.n() != cfg.n {
        return Err(Error::invalid(format!(
            "grid mismatch: datum {}, potential {}, config {}",
            u0.n(),
            xi_eps.n(),
            cfg.n
        )));
    }
    let scale = xi_eps.max_abs().max(1.0);
    if xi_eps.max_imag() > 1e-10 * scale {
        return Err(Error::invalid("potential ξ_ε must be real"));
    }
    let n = cfg.n;
    let h = cfg.signed_dt();
    let xi: Vec<f64> = xi_eps.values().iter().map(|z| z.re).collect();
    let lin = free_multiplier(n, h);
    let fft = Fft2::shared(n);
    let mut scratch = fft.scratch();
    let blocks = cfg.frame_count() - 1;
    let stride = cfg.store_stride;
    let limit = BLOWUP_THRESHOLD * BLOWUP_THRESHOLD;

    let mut u = u0.values().to_vec();
    let mut times = Vec::with_capacity(blocks + 1);
    let mut frames = Vec::with_capacity(blocks + 1);
    times.push(0.0);
    frames.push(u0.clone());

    let check = |peak: f64, step: usize| -> Result<()> {
        if peak.is_nan() || peak > limit {
            Err(Error::BlowUp {
                time: step as f64 * h,
                step,
            })
        } else {
            Ok(())
        }
    };

    for b in 0..blocks {
        let first = b * stride;
        check(phase_step(&mut u, &xi, 0.5 * h, cfg.p, cfg.nonlinearity), first)?;
        for s in 0..stride {
            fft.forward(&mut u, &mut scratch);
            for (z, m) in u.iter_mut().zip(&lin) {
                *z *= m;
            }
            fft.inverse(&mut u, &mut scratch);
            let tau = if s + 1 == stride { 0.5 * h } else { h };
            check(phase_step(&mut u, &xi, tau, cfg.p, cfg.nonlinearity), first + s + 1)?;
        }
        times.push(((b + 1) * stride) as f64 * h);
        frames.push(GridField::new(n, u.clone())?);
    }
    Trajectory::assemble(
        cfg.clone(),
        times,
        frames,
        Variable::Physical,
        NormContext::Physical { xi: xi_eps },
    )
}
