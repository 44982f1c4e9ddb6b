//! Positive-weight quadrature rules on S² under the normalized measure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harmonics::Expansion;
use crate::sphere::{PointSet, Ring, Rotation, UnitVector};

/// Residual threshold for [`verify_exactness`].
pub const EXACTNESS_TOLERANCE: f64 = 1e-9;

/// Tolerance on `Σ w = 1` for rules built in memory.
const WEIGHT_SUM_TOLERANCE: f64 = 1e-10;

/// Nodes, positive weights summing to one, and the polynomial degree the
/// rule claims to integrate exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: PointSet,
    weights: Vec<f64>,
    degree: usize,
}

impl QuadratureRule {
    pub fn new(points: PointSet, weights: Vec<f64>, degree: usize) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::Shape {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if points.is_empty() {
            return Err(Error::validation("quadrature rule has no nodes"));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::validation(format!("weight {i} is {w}, weights must be positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::validation(format!("weights sum to {total}, not 1")));
        }
        Ok(QuadratureRule {
            points,
            weights,
            degree,
        })
    }

    /// Equal weights `1/N`.
    pub fn equal_weight(points: PointSet, degree: usize) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n as f64; n], degree)
    }

    pub fn nodes(&self) -> &[UnitVector] {
        self.points.points()
    }

    pub fn point_set(&self) -> &PointSet {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Claimed exactness degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(&UnitVector) -> f64) -> f64 {
        self.nodes().iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// `Σ w_i v_i` for values aligned with the nodes.
    pub fn sum_values(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Same rule with every node rotated; ring structure is dropped.
    pub fn rotated(&self, rot: &Rotation) -> QuadratureRule {
        QuadratureRule {
            points: self.points.rotated(rot),
            weights: self.weights.clone(),
            degree: self.degree,
        }
    }

    /// Fails with [`Error::InsufficientDegree`] unless `degree() ≥ required`.
    pub fn require_degree(&self, required: usize) -> Result<()> {
        if self.degree < required {
            return Err(Error::InsufficientDegree {
                required,
                available: self.degree,
            });
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre in `z = cos θ` (`⌈(L+1)/2⌉` nodes) crossed with `L + 1`
/// equispaced longitudes. Exact for spherical polynomials of degree ≤ `L`.
pub fn tensor_rule(degree: usize) -> QuadratureRule {
    let n_lat = (degree + 2) / 2;
    let n_lon = degree + 1;
    let (z, wz) = gauss_legendre(n_lat);
    let rings: Vec<Ring> = z
        .iter()
        .map(|&z| Ring {
            z,
            phi0: 0.0,
            count: n_lon,
        })
        .collect();
    let mut weights = Vec::with_capacity(n_lat * n_lon);
    for w in &wz {
        weights.extend(std::iter::repeat_n(w / (2.0 * n_lon as f64), n_lon));
    }
    // renormalize away the last-bit error of the Gauss weights
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    QuadratureRule {
        points: PointSet::from_rings(rings),
        weights,
        degree,
    }
}

/// Reads a point-set file: one node per line as `x y z` or `x y z w`,
/// `#` comments and blank lines ignored. Without a weight column all
/// weights are `1/N`; given weights are normalized to sum to one.
pub fn load_pointset(path: impl AsRef<Path>, degree: usize) -> Result<QuadratureRule> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pointset(&text, path, degree)
}

fn parse_pointset(text: &str, path: &Path, degree: usize) -> Result<QuadratureRule> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut has_weights: Option<bool> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|e| parse_err(lineno, format!("bad number {f:?}: {e}"))))
            .collect::<Result<_>>()?;
        let weighted = match fields.len() {
            3 => false,
            4 => true,
            n => return Err(parse_err(lineno, format!("expected 3 or 4 columns, found {n}"))),
        };
        match has_weights {
            None => has_weights = Some(weighted),
            Some(w) if w != weighted => {
                return Err(parse_err(lineno, "inconsistent column count".to_string()));
            }
            _ => {}
        }
        let node = UnitVector::from_unit(fields[0], fields[1], fields[2])
            .map_err(|e| Error::validation(format!("{}:{lineno}: {e}", path.display())))?;
        nodes.push(node);
        if weighted {
            let w = fields[3];
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::validation(format!(
                    "{}:{lineno}: weight {w} is not positive",
                    path.display()
                )));
            }
            weights.push(w);
        }
    }
    if nodes.is_empty() {
        return Err(Error::validation(format!("{}: no nodes", path.display())));
    }
    let points = PointSet::from_points(nodes);
    if has_weights == Some(true) {
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        QuadratureRule::new(points, weights, degree)
    } else {
        QuadratureRule::equal_weight(points, degree)
    }
}

/// Result of checking a rule against the orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactnessReport {
    pub degree: usize,
    pub max_error: f64,
    pub pass: bool,
}

/// Checks `Σ_i w_i Y_{l,m}(x_i) = δ_{l0} δ_{m1}` for every `l ≤ degree`.
pub fn verify_exactness(rule: &QuadratureRule, degree: usize) -> ExactnessReport {
    let ones = vec![1.0; rule.len()];
    let moments = Expansion::project(&ones, rule.weights(), rule.point_set(), degree)
        .expect("weights and nodes are aligned by construction");
    let max_error = moments
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| if i == 0 { (c - 1.0).abs() } else { c.abs() })
        .fold(0.0, f64::max);
    ExactnessReport {
        degree,
        max_error,
        pass: max_error < EXACTNESS_TOLERANCE,
    }
}

/// Where a resolved rule came from.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSource {
    Design { path: PathBuf, exact_degree: bool },
    Tensor,
}

impl fmt::Display for RuleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSource::Design { path, .. } => write!(f, "design file {}", path.display()),
            RuleSource::Tensor => write!(f, "tensor Gauss-Legendre fallback"),
        }
    }
}

/// Design files found in a directory, named `design_L<degree>_N<count>.txt`.
#[derive(Debug, Clone, Default)]
pub struct DesignLibrary {
    entries: Vec<DesignEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignEntry {
    pub degree: usize,
    pub count: usize,
    pub path: PathBuf,
}

fn parse_design_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix("design_L")?.strip_suffix(".txt")?;
    let (degree, count) = rest.split_once("_N")?;
    Some((degree.parse().ok()?, count.parse().ok()?))
}

impl DesignLibrary {
    /// An empty library; every lookup falls back to tensor rules.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn scan(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut entries = Vec::new();
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name();
            if let Some((degree, count)) = name.to_str().and_then(parse_design_name) {
                entries.push(DesignEntry {
                    degree,
                    count,
                    path: entry.path(),
                });
            }
        }
        entries.sort_by_key(|e| (e.degree, e.count));
        Ok(DesignLibrary { entries })
    }

    pub fn entries(&self) -> &[DesignEntry] {
        &self.entries
    }

    /// The exact-degree design, else the smallest design of higher degree,
    /// else a tensor rule of exactly `degree`.
    pub fn resolve(&self, degree: usize) -> Result<(QuadratureRule, RuleSource)> {
        if let Some(entry) = self.entries.iter().find(|e| e.degree >= degree) {
            let rule = load_pointset(&entry.path, entry.degree)?;
            if rule.len() != entry.count {
                return Err(Error::validation(format!(
                    "{} holds {} nodes but its name declares {}",
                    entry.path.display(),
                    rule.len(),
                    entry.count
                )));
            }
            let source = RuleSource::Design {
                path: entry.path.clone(),
                exact_degree: entry.degree == degree,
            };
            return Ok((rule, source));
        }
        Ok((tensor_rule(degree), RuleSource::Tensor))
    }
}
