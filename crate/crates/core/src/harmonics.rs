//! Zonal and spherical harmonics on S².
//!
//! All inner products use the normalized surface measure (total mass 1), so
//! `Y_{0,1} = 1` and every quadrature rule has weights summing to 1. The
//! common convention orthonormal under the unnormalized measure (mass 4π) is
//! obtained by dividing our basis functions by `sqrt(4π)`.
//!
//! # Real basis ordering
//!
//! Degree `l` has `2l + 1` basis functions indexed `m = 1..=2l+1`:
//!
//! | m        | function                         |
//! |----------|----------------------------------|
//! | 1        | `Λ_l^0(z)`                       |
//! | 2k       | `Λ_l^k(z) cos(k φ)`, k = 1..=l   |
//! | 2k + 1   | `Λ_l^k(z) sin(k φ)`, k = 1..=l   |
//!
//! where `z = cos θ`, `Λ_l^0 = sqrt(2l+1) P_l` and
//! `Λ_l^k = sqrt(2 (2l+1) (l-k)!/(l+k)!) P_l^k` for `k ≥ 1` (no
//! Condon–Shortley phase). Coefficient vectors store degree blocks
//! contiguously: `(l, m)` lives at index `l² + m - 1`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sphere::{PointSet, Ring, UnitVector};

/// Number of rings handled by one parallel work item. Partial sums are
/// combined in block order so reductions do not depend on scheduling.
const RING_BLOCK: usize = 8;

/// Dimension `Z(d, l)` of the space of degree-`l` spherical harmonics on
/// S^d, computed in exact integer arithmetic.
pub fn harmonic_dimension(d: usize, l: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::domain(format!("sphere dimension d = {d} must be at least 2")));
    }
    if d == 2 {
        return Ok(2 * l as u64 + 1);
    }
    // Z(d, l) = (2l + d - 1) * C(l + d - 2, d - 2) / (d - 1)
    let overflow = || Error::domain(format!("Z({d}, {l}) overflows u64"));
    let mut binom: u128 = 1;
    for i in 1..=(d - 2) as u128 {
        binom = binom
            .checked_mul(l as u128 + i)
            .ok_or_else(overflow)?
            / i;
    }
    let numerator = binom
        .checked_mul((2 * l + d - 1) as u128)
        .ok_or_else(overflow)?;
    u64::try_from(numerator / (d as u128 - 1)).map_err(|_| overflow())
}

/// Laplace–Beltrami eigenvalue `λ_l = l (l + d - 1)`.
pub fn eigenvalue(d: usize, l: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain(format!("sphere dimension d = {d} must be at least 2")));
    }
    Ok(l as f64 * (l + d - 1) as f64)
}

/// Sobolev weight `b_l^(s) = (1 + λ_l)^(s/2)`.
pub fn sobolev_weight(d: usize, s: f64, l: usize) -> Result<f64> {
    Ok((1.0 + eigenvalue(d, l)?).powf(s / 2.0))
}

/// Legendre polynomial `P_l(t)` normalized by `P_l(1) = 1`.
pub fn legendre_normalized(l: usize, t: f64) -> Result<f64> {
    check_unit_interval(t)?;
    Ok(legendre_unchecked(l, t))
}

pub(crate) fn check_unit_interval(t: f64) -> Result<()> {
    if t.is_nan() || t.abs() > 1.0 {
        return Err(Error::domain(format!("argument t = {t} lies outside [-1, 1]")));
    }
    Ok(())
}

pub(crate) fn legendre_unchecked(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for n in 1..l {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * t * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `P_0(t), ..., P_lmax(t)`.
pub fn legendre_series(lmax: usize, t: f64) -> Result<Vec<f64>> {
    check_unit_interval(t)?;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax >= 1 {
        out.push(t);
    }
    for n in 1..lmax {
        let nf = n as f64;
        out.push(((2.0 * nf + 1.0) * t * out[n] - nf * out[n - 1]) / (nf + 1.0));
    }
    Ok(out)
}

/// A basis label `(l, m)` with `1 ≤ m ≤ 2l + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    l: usize,
    m: usize,
}

impl HarmonicIndex {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if m == 0 || m > 2 * l + 1 {
            return Err(Error::Index(format!("order m = {m} outside 1..={} for l = {l}", 2 * l + 1)));
        }
        Ok(HarmonicIndex { l, m })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Position in a coefficient vector.
    pub fn flat(&self) -> usize {
        self.l * self.l + self.m - 1
    }

    /// Inverse of [`flat`](Self::flat).
    pub fn from_flat(i: usize) -> Self {
        let l = (i as f64).sqrt() as usize;
        // guard against rounding in the square root
        let l = if (l + 1) * (l + 1) <= i { l + 1 } else if l * l > i { l - 1 } else { l };
        HarmonicIndex { l, m: i - l * l + 1 }
    }
}

/// `(lmax + 1)²`, the number of basis functions of degree ≤ `lmax`.
pub fn coeff_count(lmax: usize) -> usize {
    (lmax + 1) * (lmax + 1)
}

#[inline]
fn cos_slot(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        2 * k - 1
    }
}

#[inline]
fn sin_slot(k: usize) -> usize {
    2 * k
}

/// Recurrence coefficients for the normalized associated Legendre functions
/// `Λ_l^k`, stored order-major (`k` outer, `l = k..=lmax` inner).
#[derive(Debug, Clone)]
pub(crate) struct LegendreTable {
    lmax: usize,
    offsets: Vec<usize>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LegendreTable {
    pub(crate) fn new(lmax: usize) -> Self {
        let mut offsets = Vec::with_capacity(lmax + 1);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..=lmax {
            offsets.push(a.len());
            for l in k..=lmax {
                let (lf, kf) = (l as f64, k as f64);
                if l >= k + 2 {
                    a.push(((4.0 * lf * lf - 1.0) / (lf * lf - kf * kf)).sqrt());
                    let lm = lf - 1.0;
                    b.push(((lm * lm - kf * kf) / (4.0 * lm * lm - 1.0)).sqrt());
                } else {
                    a.push(0.0);
                    b.push(0.0);
                }
            }
        }
        LegendreTable { lmax, offsets, a, b }
    }

    /// Calls `f(k, values)` for `k = 0..=lmax`, where `values[i]` is
    /// `Λ_{k+i}^k(z)`. Sectoral seeds shrink like `sin(θ)^k`, so they
    /// underflow gracefully near the poles instead of overflowing.
    pub(crate) fn for_each_order(&self, z: f64, buf: &mut Vec<f64>, mut f: impl FnMut(usize, &[f64])) {
        let s = (1.0 - z * z).max(0.0).sqrt();
        let mut sectoral = 1.0;
        for k in 0..=self.lmax {
            if k > 0 {
                let kf = k as f64;
                sectoral *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
            }
            let n = self.lmax - k + 1;
            buf.clear();
            buf.push(sectoral);
            if n > 1 {
                buf.push((2.0 * k as f64 + 3.0).sqrt() * z * sectoral);
            }
            let off = self.offsets[k];
            for i in 2..n {
                let v = self.a[off + i] * (z * buf[i - 1] - self.b[off + i] * buf[i - 2]);
                buf.push(v);
            }
            if k > 0 {
                for v in buf.iter_mut() {
                    *v *= std::f64::consts::SQRT_2;
                }
            }
            f(k, buf);
        }
    }
}

/// All real spherical harmonics `Y_{l,m}(p)` with `l ≤ lmax`, in
/// coefficient order. Cost is `O(lmax²)`.
pub fn sph_harm_basis(lmax: usize, p: &UnitVector) -> Vec<f64> {
    let table = LegendreTable::new(lmax);
    let mut out = vec![0.0; coeff_count(lmax)];
    let mut buf = Vec::with_capacity(lmax + 1);
    let phi = p.longitude();
    table.for_each_order(p.z(), &mut buf, |k, lam| {
        let (s, c) = ((k as f64) * phi).sin_cos();
        for (i, v) in lam.iter().enumerate() {
            let l = k + i;
            out[l * l + cos_slot(k)] = v * c;
            if k > 0 {
                out[l * l + sin_slot(k)] = v * s;
            }
        }
    });
    out
}

/// A finite spherical harmonic expansion `Σ c_{lm} Y_{l,m}` of degree
/// at most `lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    lmax: usize,
    coeffs: Vec<f64>,
}

impl Expansion {
    pub fn zeros(lmax: usize) -> Self {
        Expansion {
            lmax,
            coeffs: vec![0.0; coeff_count(lmax)],
        }
    }

    pub fn from_coeffs(lmax: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != coeff_count(lmax) {
            return Err(Error::Shape {
                expected: coeff_count(lmax),
                got: coeffs.len(),
            });
        }
        Ok(Expansion { lmax, coeffs })
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, idx: HarmonicIndex) -> f64 {
        self.coeffs.get(idx.flat()).copied().unwrap_or(0.0)
    }

    /// Coefficients of degree `l`, `m = 1..=2l+1`.
    pub fn degree_block(&self, l: usize) -> &[f64] {
        &self.coeffs[l * l..(l + 1) * (l + 1)]
    }

    /// Multiplies every degree-`l` block by `factor(l)`.
    pub fn scale_degrees(&mut self, factor: impl Fn(usize) -> f64) {
        for l in 0..=self.lmax {
            let f = factor(l);
            for c in &mut self.coeffs[l * l..(l + 1) * (l + 1)] {
                *c *= f;
            }
        }
    }

    /// Copy restricted (or zero-padded) to degree `lmax`.
    pub fn resized(&self, lmax: usize) -> Expansion {
        let mut coeffs = vec![0.0; coeff_count(lmax)];
        let n = coeffs.len().min(self.coeffs.len());
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        Expansion { lmax, coeffs }
    }

    /// `self += other`, growing `self` if needed.
    pub fn add_assign(&mut self, other: &Expansion) {
        if other.lmax > self.lmax {
            *self = self.resized(other.lmax);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    /// Squared 𝕃₂ norm under the normalized measure (Parseval).
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn evaluate_at(&self, p: &UnitVector) -> f64 {
        self.evaluate(&PointSet::from_points(vec![*p]))[0]
    }

    /// Values at every point, in point order.
    pub fn evaluate(&self, points: &PointSet) -> Vec<f64> {
        let table = LegendreTable::new(self.lmax);
        let rings = points.rings();
        let blocks: Vec<Vec<f64>> = rings
            .par_chunks(RING_BLOCK)
            .map(|chunk| {
                let mut out = Vec::with_capacity(chunk.iter().map(|r| r.count).sum());
                let mut buf = Vec::with_capacity(self.lmax + 1);
                for ring in chunk {
                    self.evaluate_ring(&table, ring, &mut buf, &mut out);
                }
                out
            })
            .collect();
        blocks.concat()
    }

    fn evaluate_ring(&self, table: &LegendreTable, ring: &Ring, buf: &mut Vec<f64>, out: &mut Vec<f64>) {
        let lmax = self.lmax;
        let mut cos_sums = vec![0.0; lmax + 1];
        let mut sin_sums = vec![0.0; lmax + 1];
        let c = &self.coeffs;
        table.for_each_order(ring.z, buf, |k, lam| {
            let (mut sc, mut ss) = (0.0, 0.0);
            let (cs, sn) = (cos_slot(k), sin_slot(k));
            for (i, v) in lam.iter().enumerate() {
                let base = (k + i) * (k + i);
                sc += c[base + cs] * v;
                if k > 0 {
                    ss += c[base + sn] * v;
                }
            }
            cos_sums[k] = sc;
            sin_sums[k] = ss;
        });
        for i in 0..ring.count {
            let (s1, c1) = ring.longitude(i).sin_cos();
            let (mut ck, mut sk) = (1.0, 0.0);
            let mut acc = cos_sums[0];
            for k in 1..=lmax {
                let next_c = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = next_c;
                acc += cos_sums[k] * ck + sin_sums[k] * sk;
            }
            out.push(acc);
        }
    }

    /// Discrete projection `c_{lm} = Σ_i w_i v_i Y_{l,m}(x_i)` for all
    /// `l ≤ lmax`.
    pub fn project(values: &[f64], weights: &[f64], points: &PointSet, lmax: usize) -> Result<Expansion> {
        if values.len() != points.len() {
            return Err(Error::Shape {
                expected: points.len(),
                got: values.len(),
            });
        }
        if weights.len() != points.len() {
            return Err(Error::Shape {
                expected: points.len(),
                got: weights.len(),
            });
        }
        let table = LegendreTable::new(lmax);
        let rings = points.rings();
        let offsets = points.ring_offsets();
        let ring_ids: Vec<usize> = (0..rings.len()).collect();
        let partials: Vec<Vec<f64>> = ring_ids
            .par_chunks(RING_BLOCK)
            .map(|chunk| {
                let mut acc = vec![0.0; coeff_count(lmax)];
                let mut buf = Vec::with_capacity(lmax + 1);
                for &r in chunk {
                    let ring = &rings[r];
                    let start = offsets[r];
                    let v = &values[start..start + ring.count];
                    let w = &weights[start..start + ring.count];
                    project_ring(&table, ring, v, w, lmax, &mut buf, &mut acc);
                }
                acc
            })
            .collect();
        let mut coeffs = vec![0.0; coeff_count(lmax)];
        for part in partials {
            for (a, b) in coeffs.iter_mut().zip(part) {
                *a += b;
            }
        }
        Ok(Expansion { lmax, coeffs })
    }
}

fn project_ring(
    table: &LegendreTable,
    ring: &Ring,
    values: &[f64],
    weights: &[f64],
    lmax: usize,
    buf: &mut Vec<f64>,
    acc: &mut [f64],
) {
    // longitude moments Σ w v cos(kφ), Σ w v sin(kφ)
    let mut cos_mom = vec![0.0; lmax + 1];
    let mut sin_mom = vec![0.0; lmax + 1];
    for i in 0..ring.count {
        let wv = weights[i] * values[i];
        if wv == 0.0 {
            continue;
        }
        let (s1, c1) = ring.longitude(i).sin_cos();
        let (mut ck, mut sk) = (1.0, 0.0);
        cos_mom[0] += wv;
        for k in 1..=lmax {
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
            cos_mom[k] += wv * ck;
            sin_mom[k] += wv * sk;
        }
    }
    table.for_each_order(ring.z, buf, |k, lam| {
        let (fc, fs) = (cos_mom[k], sin_mom[k]);
        let (cs, sn) = (cos_slot(k), sin_slot(k));
        for (i, v) in lam.iter().enumerate() {
            let base = (k + i) * (k + i);
            acc[base + cs] += fc * v;
            if k > 0 {
                acc[base + sn] += fs * v;
            }
        }
    });
}
