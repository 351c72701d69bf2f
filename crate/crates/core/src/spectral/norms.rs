use num_complex::Complex64;

use super::{wavenumber, GridField};
use crate::dynamics::Trajectory;
use crate::{Error, Result};

/// `(Σ_n (1+|n|²)^γ |f̂(n)|²)^{1/2}`.
pub fn sobolev_norm(f: &GridField, gamma: f64) -> f64 {
    let n = f.n();
    let c = f.coefficients();
    let mut acc = 0.0;
    for k1 in 0..n {
        let m1 = wavenumber(k1, n) as f64;
        for k2 in 0..n {
            let m2 = wavenumber(k2, n) as f64;
            let w = 1.0 + m1 * m1 + m2 * m2;
            let weight = if gamma == 0.0 { 1.0 } else { w.powf(gamma) };
            acc += weight * c[k1 * n + k2].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Lebesgue norm under the normalized measure; `p = ∞` gives the max modulus.
pub fn lp_norm(f: &GridField, p: f64) -> f64 {
    debug_assert!(p >= 1.0, "lp_norm: p = {p} < 1");
    let v = f.values();
    if p.is_infinite() {
        return f.max_abs();
    }
    let mean = if p == 2.0 {
        f.mean_abs2()
    } else {
        v.iter().map(|z| z.norm().powf(p)).sum::<f64>() / v.len() as f64
    };
    mean.powf(1.0 / p)
}

/// Applies the Bessel potential `(1+|n|²)^{s/2}`.
pub fn bessel_potential(f: &GridField, s: f64) -> GridField {
    if s == 0.0 {
        return f.clone();
    }
    f.apply_multiplier(|m1, m2| {
        Complex64::new((1.0 + (m1 * m1 + m2 * m2) as f64).powf(s / 2.0), 0.0)
    })
}

/// Bessel-potential realization of the `W^{s,p}` norm.
pub fn wsp_norm(f: &GridField, s: f64, p: f64) -> f64 {
    lp_norm(&bessel_potential(f, s), p)
}

/// Dyadic levels `1, 2, 4, …, N/2` available on an `n`-grid.
pub fn dyadic_levels(n: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&m| Some(m * 2))
        .take_while(|&m| m <= n / 2)
        .collect()
}

/// Sharp Littlewood–Paley block: modes with `M ≤ |n| < 2M`, where the
/// lowest block `M = 1` also holds the zero mode. Summing the blocks over
/// [`dyadic_levels`] reproduces every grid mode exactly once.
pub fn lp_block(f: &GridField, level: usize) -> Result<GridField> {
    let n = f.n();
    if !level.is_power_of_two() || level > n / 2 {
        return Err(Error::invalid(format!(
            "dyadic level {level} not in {{1, 2, …, {}}}",
            n / 2
        )));
    }
    let lo = if level == 1 { 0 } else { (level * level) as i64 };
    let hi = (4 * level * level) as i64;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(f.apply_multiplier(|m1, m2| {
        let r2 = m1 * m1 + m2 * m2;
        if r2 >= lo && r2 < hi {
            one
        } else {
            zero
        }
    }))
}

/// `L^r` in time (trapezoid over the stored frames) of the `W^{s,q}` norm
/// in space; `r = ∞` is the max over frames.
pub fn spacetime_norm_frames(
    times: &[f64],
    frames: &[GridField],
    r: f64,
    q: f64,
    s: f64,
) -> Result<f64> {
    if frames.len() < 2 || times.len() != frames.len() {
        return Err(Error::invalid(format!(
            "space-time norm needs ≥ 2 frames with matching times (got {} frames, {} times)",
            frames.len(),
            times.len()
        )));
    }
    if !(r >= 1.0 && q >= 1.0 && s >= 0.0) {
        return Err(Error::invalid(format!(
            "space-time exponents out of range: r = {r}, q = {q}, s = {s}"
        )));
    }
    let spatial: Vec<f64> = frames
        .iter()
        .map(|f| if s == 0.0 { lp_norm(f, q) } else { wsp_norm(f, s, q) })
        .collect();
    if r.is_infinite() {
        return Ok(spatial.iter().copied().fold(0.0, f64::max));
    }
    let integral: f64 = times
        .windows(2)
        .zip(spatial.windows(2))
        .map(|(t, g)| 0.5 * (t[1] - t[0]) * (g[0].powf(r) + g[1].powf(r)))
        .sum();
    Ok(integral.powf(1.0 / r))
}

pub fn spacetime_norm(traj: &Trajectory, r: f64, q: f64, s: f64) -> Result<f64> {
    spacetime_norm_frames(&traj.times, &traj.frames, r, q, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(n: usize, m: (i64, i64)) -> GridField {
        GridField::from_modes(n, &[(m, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn sobolev_single_modes() {
        assert!((sobolev_norm(&mode(16, (1, 0)), 1.0) - 2f64.sqrt()).abs() < 1e-13);
        assert!((sobolev_norm(&mode(16, (3, 4)), 2.0) - 26.0).abs() < 1e-12);
        let one = GridField::constant(16, Complex64::new(1.0, 0.0));
        for g in [-2.0, 0.0, 1.5, 4.0] {
            assert!((sobolev_norm(&one, g) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn lp_norms() {
        let c = GridField::constant(8, Complex64::new(0.0, -3.0));
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lp_norm(&c, p) - 3.0).abs() < 1e-14);
        }
        let e = mode(16, (2, -1));
        for p in [1.0, 4.0, f64::INFINITY] {
            assert!((lp_norm(&e, p) - 1.0).abs() < 1e-13);
        }
        let cos = GridField::from_real_fn(32, |a, _| a.cos());
        assert!((lp_norm(&cos, 4.0) - 0.375f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn wsp_matches_special_cases() {
        let e = mode(16, (1, 0));
        assert!((wsp_norm(&e, 0.75, 4.0) - 2f64.powf(0.375)).abs() < 1e-13);
        let f = GridField::from_fn(16, |a, b| Complex64::new(a.sin() * b.cos(), (2.0 * a).cos()));
        assert!((wsp_norm(&f, 0.0, 3.0) - lp_norm(&f, 3.0)).abs() < 1e-14);
        assert!((wsp_norm(&f, 1.0, 2.0) - sobolev_norm(&f, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn blocks() {
        let e = mode(32, (3, 0));
        for level in dyadic_levels(32) {
            let b = lp_block(&e, level).unwrap();
            if level == 2 {
                assert!(b.sub(&e).unwrap().max_abs() < 1e-13);
            } else {
                assert!(b.max_abs() < 1e-13);
            }
        }
        assert!(lp_block(&e, 3).is_err());
        assert!(lp_block(&e, 32).is_err());
        // (1,1) has |n| = √2 and must land in the lowest block.
        let d = mode(32, (1, 1));
        assert!(lp_block(&d, 1).unwrap().sub(&d).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn trapezoid_in_time() {
        let a = GridField::constant(8, Complex64::new(2.0, 0.0));
        let b = GridField::constant(8, Complex64::new(5.0, 0.0));
        let t = 0.7;
        let v = spacetime_norm_frames(&[0.0, t], &[a.clone(), b.clone()], 2.0, 4.0, 0.0).unwrap();
        assert!((v - (t * (4.0 + 25.0) / 2.0).sqrt()).abs() < 1e-14);
        let vmax =
            spacetime_norm_frames(&[0.0, t], &[a.clone(), b], f64::INFINITY, 4.0, 0.0).unwrap();
        assert!((vmax - 5.0).abs() < 1e-14);
        assert!(spacetime_norm_frames(&[0.0], &[a], 2.0, 2.0, 0.0).is_err());
    }
}
