//! Band-limited isotropic Gaussian random fields via truncated
//! Karhunen-Loève expansions, and the cosine-cap mean field.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::harmonics::{coeff_count, eigenvalue, Expansion, HarmonicIndex};
use crate::kernel::ZonalKernel;
use crate::sphere::{PointSet, UnitVector};

/// `A_l = (1 + δl)^{-(2s+2)}` for `0 ≤ l ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularPowerSpectrum {
    delta: f64,
    s: f64,
    max_degree: usize,
}

impl AngularPowerSpectrum {
    pub fn new(delta: f64, s: f64, max_degree: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::domain(format!("spectrum scale delta must be positive, got {delta}")));
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::domain(format!("smoothness s must be positive, got {s}")));
        }
        Ok(AngularPowerSpectrum { delta, s, max_degree })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Truncation degree `M`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn eval(&self, l: usize) -> Result<f64> {
        if l > self.max_degree {
            return Err(Error::domain(format!(
                "degree {l} beyond truncation degree {}",
                self.max_degree
            )));
        }
        Ok(self.value(l))
    }

    fn value(&self, l: usize) -> f64 {
        (1.0 + self.delta * l as f64).powf(-(2.0 * self.s + 2.0))
    }

    /// Pointwise variance `Σ_l A_l (2l+1)` of the centered field.
    pub fn pointwise_variance(&self) -> f64 {
        (0..=self.max_degree).map(|l| self.value(l) * (2 * l + 1) as f64).sum()
    }

    /// `E ‖T - μ₀‖²` in the Sobolev norm of order `sigma`:
    /// `Σ_l (1+λ_l)^σ (2l+1) A_l`.
    pub fn expected_sobolev_norm_sq(&self, sigma: f64) -> f64 {
        (0..=self.max_degree)
            .map(|l| (1.0 + (l * (l + 1)) as f64).powf(sigma) * (2 * l + 1) as f64 * self.value(l))
            .sum()
    }
}

pub fn aps_eval(spec: &AngularPowerSpectrum, l: usize) -> Result<f64> {
    spec.eval(l)
}

/// One realisation: coefficients `a_lm` for `l ≤ M` plus its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    spectrum: AngularPowerSpectrum,
    seed: u64,
    mu0: f64,
    coeffs: Expansion,
}

impl FieldSample {
    /// Wraps given coefficients; their degree must equal the truncation.
    pub fn from_coeffs(spectrum: AngularPowerSpectrum, seed: u64, mu0: f64, coeffs: Expansion) -> Result<Self> {
        if coeffs.lmax() != spectrum.max_degree() {
            return Err(Error::Shape {
                expected: coeff_count(spectrum.max_degree()),
                got: coeffs.coeffs().len(),
            });
        }
        Ok(FieldSample {
            spectrum,
            seed,
            mu0,
            coeffs,
        })
    }

    pub fn spectrum(&self) -> &AngularPowerSpectrum {
        &self.spectrum
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn expansion(&self) -> &Expansion {
        &self.coeffs
    }

    pub fn coeff(&self, idx: HarmonicIndex) -> f64 {
        self.coeffs.get(idx)
    }

    /// Multiplies the fluctuation `T - μ₀` by `factor`, keeping the mean.
    pub fn scale_fluctuations(&mut self, factor: f64) {
        let c = self.coeffs.coeffs_mut();
        c[0] = self.mu0 + factor * (c[0] - self.mu0);
        c[1..].iter_mut().for_each(|a| *a *= factor);
    }

    /// Header `mu0,delta,s,M,seed` with its values, then `l,m,a` rows in
    /// degree-major order (`m` from 1).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(32 * self.coeffs.coeffs().len() + 64);
        out.push_str("mu0,delta,s,M,seed\n");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            self.mu0,
            self.spectrum.delta(),
            self.spectrum.s(),
            self.spectrum.max_degree(),
            self.seed
        ));
        out.push_str("l,m,a\n");
        for (i, a) in self.coeffs.coeffs().iter().enumerate() {
            let idx = HarmonicIndex::from_flat(i);
            out.push_str(&format!("{},{},{a:.16e}\n", idx.l(), idx.m()));
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut expect = |want: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, l)) if want.is_empty() || l == want => Ok((n, l.to_string())),
                Some((n, l)) => Err(err(n, format!("expected {want:?}, found {l:?}"))),
                None => Err(err(0, format!("file ends before {want:?}"))),
            }
        };
        expect("mu0,delta,s,M,seed")?;
        let (n, values) = expect("")?;
        let v: Vec<&str> = values.split(',').collect();
        if v.len() != 5 {
            return Err(err(n, format!("expected 5 header values, found {}", v.len())));
        }
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|e| err(n, format!("bad number {s:?}: {e}"))) };
        let int = |s: &str| -> Result<u64> { s.parse().map_err(|e| err(n, format!("bad integer {s:?}: {e}"))) };
        let (mu0, delta, s, m, seed) = (num(v[0])?, num(v[1])?, num(v[2])?, int(v[3])? as usize, int(v[4])?);
        let spectrum = AngularPowerSpectrum::new(delta, s, m).map_err(|e| err(n, e.to_string()))?;
        expect("l,m,a")?;
        let mut coeffs = Vec::with_capacity(coeff_count(m));
        for (n, line) in lines.filter(|(_, l)| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(err(n, format!("expected 3 fields, found {}", f.len())));
            }
            let l: usize = f[0].parse().map_err(|e| err(n, format!("bad degree: {e}")))?;
            let mm: usize = f[1].parse().map_err(|e| err(n, format!("bad order: {e}")))?;
            let a: f64 = f[2].parse().map_err(|e| err(n, format!("bad coefficient: {e}")))?;
            let idx = HarmonicIndex::new(l, mm).map_err(|e| err(n, e.to_string()))?;
            if idx.flat() != coeffs.len() {
                return Err(err(n, format!("coefficient ({l},{mm}) out of order")));
            }
            coeffs.push(a);
        }
        let expansion = Expansion::from_coeffs(m, coeffs)?;
        FieldSample::from_coeffs(spectrum, seed, mu0, expansion)
    }
}

/// The generator behind [`sample_field`] and realisation `stream` of a
/// Monte-Carlo run seeded with `seed`.
pub fn field_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `a_lm ~ N(0, A_l)` independently in degree-major, order-minor
/// order, then shifts `a_{0,1}` by `mu0`.
pub fn sample_field_with<R: Rng + ?Sized>(
    spectrum: &AngularPowerSpectrum,
    seed: u64,
    mu0: f64,
    rng: &mut R,
) -> FieldSample {
    let lmax = spectrum.max_degree();
    let mut coeffs = Vec::with_capacity(coeff_count(lmax));
    for l in 0..=lmax {
        let sd = spectrum.value(l).sqrt();
        for _ in 0..(2 * l + 1) {
            let z: f64 = rng.sample(StandardNormal);
            coeffs.push(sd * z);
        }
    }
    coeffs[0] += mu0;
    FieldSample {
        spectrum: *spectrum,
        seed,
        mu0,
        coeffs: Expansion::from_coeffs(lmax, coeffs).expect("length matches"),
    }
}

pub fn sample_field(spectrum: &AngularPowerSpectrum, seed: u64, mu0: f64) -> FieldSample {
    sample_field_with(spectrum, seed, mu0, &mut field_rng(seed, 0))
}

pub fn eval_field(sample: &FieldSample, points: &PointSet) -> Vec<f64> {
    sample.coeffs.evaluate(points)
}

/// Covariance `Σ_{l ≤ M} A_l (2l+1) P_l(t)`.
pub fn covariance_value(spectrum: &AngularPowerSpectrum, t: f64) -> Result<f64> {
    let coeffs = (0..=spectrum.max_degree())
        .map(|l| spectrum.value(l) * (2 * l + 1) as f64)
        .collect();
    ZonalKernel::from_legendre_coeffs(coeffs).eval(t)
}

/// `Σ_l Σ_m (1+λ_l)^s a_lm²`.
pub fn sobolev_norm_sq(sample: &FieldSample, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("Sobolev order must be nonnegative, got {s}")));
    }
    let e = &sample.coeffs;
    (0..=e.lmax())
        .map(|l| {
            let w = (1.0 + eigenvalue(2, l)?).powf(s);
            Ok(w * e.degree_block(l).iter().map(|a| a * a).sum::<f64>())
        })
        .sum()
}

/// `cos(π/2 · d/r)` within geodesic distance `r` of the center, 0 outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineCap {
    center: UnitVector,
    radius: f64,
}

pub const DEFAULT_CAP_RADIUS: f64 = std::f64::consts::FRAC_PI_3;

impl CosineCap {
    pub fn new(center: UnitVector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= std::f64::consts::PI) {
            return Err(Error::domain(format!("cap radius {radius} must lie in (0, pi]")));
        }
        Ok(CosineCap { center, radius })
    }

    pub fn center(&self) -> UnitVector {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, p: &UnitVector) -> f64 {
        let d = p.distance(&self.center);
        if d <= self.radius {
            (std::f64::consts::FRAC_PI_2 * d / self.radius).cos()
        } else {
            0.0
        }
    }

    pub fn contains(&self, p: &UnitVector) -> bool {
        p.distance(&self.center) <= self.radius
    }
}

/// North-pole cap of radius π/3.
impl Default for CosineCap {
    fn default() -> Self {
        CosineCap {
            center: UnitVector::NORTH,
            radius: DEFAULT_CAP_RADIUS,
        }
    }
}

pub fn ccap_eval(cap: &CosineCap, p: &UnitVector) -> f64 {
    cap.eval(p)
}

/// Field plus cosine cap at every point.
pub fn composite_field(sample: &FieldSample, cap: &CosineCap, points: &PointSet) -> Vec<f64> {
    let mut values = eval_field(sample, points);
    values.iter_mut().zip(points.points()).for_each(|(v, p)| *v += cap.eval(p));
    values
}
