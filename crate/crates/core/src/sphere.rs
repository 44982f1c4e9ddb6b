//! Points on the unit sphere S² and ring-structured point sets.
//!
//! Every [`PointSet`] is stored as a list of iso-latitude rings of
//! equispaced longitudes. Scattered points are rings of one node. Tensor
//! quadrature rules and lat-lon grids keep their full ring structure, which
//! lets the harmonic transforms separate the latitude and longitude sums.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Tolerance on `|p| = 1` for vectors read from external sources.
pub const UNIT_TOLERANCE: f64 = 1e-8;

/// A point on S², stored in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const NORTH: UnitVector = UnitVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Normalizes `(x, y, z)`; rejects zero and non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::domain(format!(
                "cannot normalize vector ({x}, {y}, {z})"
            )));
        }
        Ok(UnitVector {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Accepts `(x, y, z)` only if it already has unit length within
    /// [`UNIT_TOLERANCE`], then renormalizes to full precision.
    pub fn from_unit(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::validation(format!(
                "node ({x}, {y}, {z}) has norm {norm}, not 1"
            )));
        }
        Self::new(x, y, z)
    }

    /// Colatitude `theta` in `[0, pi]`, longitude `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        UnitVector {
            x: s * phi.cos(),
            y: s * phi.sin(),
            z: theta.cos(),
        }
    }

    /// `z = cos(theta)` and longitude.
    pub(crate) fn from_z_phi(z: f64, phi: f64) -> Self {
        let s = (1.0 - z * z).max(0.0).sqrt();
        UnitVector {
            x: s * phi.cos(),
            y: s * phi.sin(),
            z,
        }
    }

    /// Uniformly distributed with respect to surface measure.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            if let Ok(p) = Self::new(x, y, z) {
                return p;
            }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Inner product, clamped to `[-1, 1]`.
    pub fn dot(&self, other: &UnitVector) -> f64 {
        (self.x * other.x + self.y * other.y + self.z * other.z).clamp(-1.0, 1.0)
    }

    /// Geodesic distance `arccos(p . q)`.
    pub fn distance(&self, other: &UnitVector) -> f64 {
        self.dot(other).acos()
    }

    /// Longitude in `(-pi, pi]`.
    pub fn longitude(&self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Latitude in degrees.
    pub fn latitude_deg(&self) -> f64 {
        self.z.asin().to_degrees()
    }

    pub fn rotate(&self, rot: &Rotation) -> UnitVector {
        let m = &rot.0;
        let v = [self.x, self.y, self.z];
        let r = |i: usize| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
        // Orthogonal matrices preserve the norm up to rounding.
        UnitVector::new(r(0), r(1), r(2)).expect("rotation of a unit vector")
    }
}

/// A proper rotation of R³ as an orthogonal 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    /// Rotation from ZYZ Euler angles.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |a: f64| [[a.cos(), -a.sin(), 0.0], [a.sin(), a.cos(), 0.0], [0.0, 0.0, 1.0]];
        let ry = |b: f64| [[b.cos(), 0.0, b.sin()], [0.0, 1.0, 0.0], [-b.sin(), 0.0, b.cos()]];
        Rotation(matmul(&matmul(&rz(alpha), &ry(beta)), &rz(gamma)))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let alpha = rng.random::<f64>() * 2.0 * PI;
        let beta = (2.0 * rng.random::<f64>() - 1.0).acos();
        let gamma = rng.random::<f64>() * 2.0 * PI;
        Self::from_euler(alpha, beta, gamma)
    }
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// An iso-latitude ring of `count` equispaced longitudes
/// `phi0 + 2 pi i / count`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub z: f64,
    pub phi0: f64,
    pub count: usize,
}

impl Ring {
    pub fn longitude(&self, i: usize) -> f64 {
        self.phi0 + 2.0 * PI * i as f64 / self.count as f64
    }
}

/// An ordered list of points, grouped into rings.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<UnitVector>,
    rings: Vec<Ring>,
    offsets: Vec<usize>,
}

impl PointSet {
    /// Scattered points; each one becomes its own ring.
    pub fn from_points(points: Vec<UnitVector>) -> Self {
        let rings = points
            .iter()
            .map(|p| Ring {
                z: p.z(),
                phi0: p.longitude(),
                count: 1,
            })
            .collect();
        let offsets = (0..points.len()).collect();
        PointSet {
            points,
            rings,
            offsets,
        }
    }

    /// Points generated ring by ring, in ring order.
    pub fn from_rings(rings: Vec<Ring>) -> Self {
        let mut points = Vec::with_capacity(rings.iter().map(|r| r.count).sum());
        let mut offsets = Vec::with_capacity(rings.len());
        for ring in &rings {
            offsets.push(points.len());
            points.extend((0..ring.count).map(|i| UnitVector::from_z_phi(ring.z, ring.longitude(i))));
        }
        PointSet {
            points,
            rings,
            offsets,
        }
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    /// Index of the first point of each ring.
    pub fn ring_offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// True when at least one ring carries more than one node.
    pub fn has_ring_structure(&self) -> bool {
        self.rings.iter().any(|r| r.count > 1)
    }

    pub fn rotated(&self, rot: &Rotation) -> PointSet {
        PointSet::from_points(self.points.iter().map(|p| p.rotate(rot)).collect())
    }
}
