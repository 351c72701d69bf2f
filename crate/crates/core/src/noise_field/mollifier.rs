use std::sync::OnceLock;

use crate::{Error, Result};

/// Bump profiles available for `χ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierKind {
    /// `χ(x) = c·exp(−1/(1 − |2x|²))` on `|x| < 1/2`, unit mass.
    Bump,
}

/// Mollification scale together with the cached symbol `χ̂(εn)` on a
/// lattice. `epsilon = 0` encodes the un-mollified limit (`χ̂ ≡ 1`).
#[derive(Clone, Debug)]
pub struct MollifierSpec {
    pub epsilon: f64,
    pub kind: MollifierKind,
    table: OnceLock<(usize, Vec<f64>)>,
}

impl PartialEq for MollifierSpec {
    fn eq(&self, other: &Self) -> bool {
        self.epsilon == other.epsilon && self.kind == other.kind
    }
}

impl MollifierSpec {
    pub fn new(epsilon: f64, kind: MollifierKind) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::invalid(format!("ε = {epsilon} must be finite and ≥ 0")));
        }
        Ok(MollifierSpec {
            epsilon,
            kind,
            table: OnceLock::new(),
        })
    }

    pub fn bump(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, MollifierKind::Bump)
    }

    /// The un-mollified limit `χ̂ ≡ 1`.
    pub fn identity() -> Self {
        MollifierSpec {
            epsilon: 0.0,
            kind: MollifierKind::Bump,
            table: OnceLock::new(),
        }
    }

    /// `χ̂(εn)` for every mode of the `max|nᵢ| ≤ K` lattice, row-major over
    /// `n₁, n₂ ∈ [-K, K]`. The first lattice requested is cached.
    pub fn symbol_table(&self, halfwidth: usize) -> std::borrow::Cow<'_, [f64]> {
        let (k, table) = self
            .table
            .get_or_init(|| (halfwidth, self.compute_table(halfwidth)));
        if *k == halfwidth {
            std::borrow::Cow::Borrowed(table.as_slice())
        } else {
            std::borrow::Cow::Owned(self.compute_table(halfwidth))
        }
    }

    fn compute_table(&self, halfwidth: usize) -> Vec<f64> {
        let k = halfwidth as i64;
        let mut out = Vec::with_capacity((2 * halfwidth + 1).pow(2));
        for n1 in -k..=k {
            for n2 in -k..=k {
                out.push(self.symbol(n1, n2));
            }
        }
        out
    }

    #[inline]
    pub fn symbol(&self, n1: i64, n2: i64) -> f64 {
        if self.epsilon == 0.0 {
            return 1.0;
        }
        let r = ((n1 * n1 + n2 * n2) as f64).sqrt();
        match self.kind {
            MollifierKind::Bump => bump_transform(self.epsilon * r),
        }
    }
}

/// Smallest `ε·N` accepted by default: below it the mollified potential is
/// no longer resolved by the grid.
pub const MIN_RESOLUTION: f64 = 8.0;

/// Rejects `0 < ε < MIN_RESOLUTION / N`.
pub fn check_resolution(epsilon: f64, n: usize) -> Result<()> {
    if epsilon > 0.0 && epsilon * (n as f64) < MIN_RESOLUTION {
        return Err(Error::invalid(format!(
            "ε = {epsilon} is under-resolved on an {n}-grid (ε·N = {} < {MIN_RESOLUTION})",
            epsilon * n as f64
        )));
    }
    Ok(())
}

/// `χ̂(εn)`, so that `ξ̂_ε(n) = χ̂(εn) g_n`.
pub fn mollifier_symbol(spec: &MollifierSpec, n: (i64, i64)) -> f64 {
    spec.symbol(n.0, n.1)
}

const QUAD_POINTS: usize = 4096;
const TABLE_STEP: f64 = 1.0 / 64.0;
const TABLE_MAX: f64 = 1024.0;

struct BumpTable {
    value: Vec<f64>,
    slope: Vec<f64>,
}

#[inline]
fn bump_profile(r2_scaled: f64) -> f64 {
    if r2_scaled < 1.0 {
        (-1.0 / (1.0 - r2_scaled)).exp()
    } else {
        0.0
    }
}

/// The bump is radial, so `χ̂(k) = ∫ m(x) cos(kx) dx` with `m` the marginal
/// `m(x) = ∫ χ(x, y) dy`. Both integrals are midpoint sums on a 4096² grid
/// of `[-1/2, 1/2]²`; the integrand is C^∞ with compact support, so the
/// sums converge faster than any power of the spacing.
fn bump_table() -> &'static BumpTable {
    static TABLE: OnceLock<BumpTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / QUAD_POINTS as f64;
        let nodes: Vec<f64> = (0..QUAD_POINTS).map(|i| (i as f64 + 0.5) * h - 0.5).collect();
        let marginal: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                nodes
                    .iter()
                    .map(|&y| bump_profile(4.0 * (x * x + y * y)))
                    .sum::<f64>()
                    * h
            })
            .collect();
        let mass: f64 = marginal.iter().sum::<f64>() * h;
        // m is even: keep x > 0 and double.
        let half: Vec<(f64, f64)> = nodes
            .iter()
            .zip(&marginal)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &m)| (x, 2.0 * m * h / mass))
            .collect();

        let count = (TABLE_MAX / TABLE_STEP) as usize + 1;
        let mut value = vec![0.0; count];
        let mut slope = vec![0.0; count];
        // Rotate e^{i k x} in k-steps instead of calling cos/sin per entry;
        // re-anchor periodically to keep the recurrence error at roundoff.
        const ANCHOR: usize = 256;
        let steps: Vec<(f64, f64)> = half
            .iter()
            .map(|&(x, _)| ((TABLE_STEP * x).cos(), (TABLE_STEP * x).sin()))
            .collect();
        let mut rot: Vec<(f64, f64)> = vec![(1.0, 0.0); half.len()];
        for j in 0..count {
            if j % ANCHOR == 0 {
                let k = j as f64 * TABLE_STEP;
                for (r, &(x, _)) in rot.iter_mut().zip(&half) {
                    *r = ((k * x).cos(), (k * x).sin());
                }
            }
            let mut v = 0.0;
            let mut d = 0.0;
            for ((c, s), &(x, w)) in rot.iter().zip(&half) {
                v += w * c;
                d -= w * x * s;
            }
            value[j] = v;
            slope[j] = d;
            for (r, &(c, s)) in rot.iter_mut().zip(&steps) {
                *r = (r.0 * c - r.1 * s, r.0 * s + r.1 * c);
            }
        }
        BumpTable { value, slope }
    })
}

/// Fourier transform `χ̂(k) = ∫ χ(y) e^{-i k·y} dy` of the unit-mass bump at
/// `|k| = k`, by cubic Hermite interpolation of a quadrature table.
/// Vanishes (below 10⁻¹⁵) beyond the table range.
pub fn bump_transform(k: f64) -> f64 {
    let k = k.abs();
    if k >= TABLE_MAX {
        return 0.0;
    }
    let t = bump_table();
    let pos = k / TABLE_STEP;
    let i = (pos as usize).min(t.value.len() - 2);
    let s = pos - i as f64;
    let (y0, y1) = (t.value[i], t.value[i + 1]);
    let (d0, d1) = (t.slope[i] * TABLE_STEP, t.slope[i + 1] * TABLE_STEP);
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * d1
}
