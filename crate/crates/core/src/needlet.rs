//! Needlet systems and the fully discrete needlet approximation.
//!
//! Level `j` of a system owns a quadrature rule `{(w_jk, x_jk)}` exact to
//! degree `2^{j+1} - 1`; its needlets are
//!
//! ```text
//! ψ_jk(x) = sqrt(w_jk) · v_{2^{j-1}, h}(x · x_jk)
//! ```
//!
//! Analysis and synthesis run in the spherical harmonic domain: by the
//! addition theorem, the sum over quadrature nodes of a zonal kernel is a
//! projection onto `Y_{l,m}` followed by a per-degree filter. The direct
//! kernel sums ([`NeedletSystem::needlet_eval`], [`filtered_hyper`]) are
//! kept as the independent route for checking the spectral one.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{Filter, NeedletFilter};
use crate::harmonics::Expansion;
use crate::kernel::{filter_multipliers, ZonalKernel};
use crate::quadrature::{tensor_rule, verify_exactness, DesignLibrary, QuadratureRule, RuleSource};
use crate::sphere::{PointSet, UnitVector};

/// Whether an insufficient quadrature degree is an error or only recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreePolicy {
    #[default]
    Enforce,
    Override,
}

impl DegreePolicy {
    /// `Ok(true)` when the rule is under-resolved but the policy allows it.
    pub(crate) fn check(self, rule: &QuadratureRule, required: usize) -> Result<bool> {
        match (rule.require_degree(required), self) {
            (Ok(()), _) => Ok(false),
            (Err(_), DegreePolicy::Override) => Ok(true),
            (Err(e), DegreePolicy::Enforce) => Err(e),
        }
    }
}

/// Values of an approximation at a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub values: Vec<f64>,
    /// Set when the discretisation rule was below the required degree.
    pub under_resolved: bool,
}

/// Kernel radius `R = 2^{j-1}` of level `j` (`1/2` at level 0).
pub fn level_radius(j: usize) -> f64 {
    2f64.powi(j as i32 - 1)
}

/// Polynomial degree `2^j - 1` of level-`j` needlets.
pub fn level_degree(j: usize) -> usize {
    (1usize << j) - 1
}

/// Exactness `2^{j+1} - 1` required of the level-`j` rule.
pub fn level_rule_degree(j: usize) -> usize {
    (1usize << (j + 1)) - 1
}

/// Exactness `3 · 2^{J-1} - 1` required of the discretisation rule for an
/// order-`J` approximation (0 when `J = 0`).
pub fn discretisation_degree(max_level: usize) -> usize {
    (3usize << max_level) / 2 - 1
}

/// Needlet filter plus one quadrature rule per level `0..=J`.
#[derive(Debug, Clone)]
pub struct NeedletSystem {
    filter: NeedletFilter,
    level_rules: Vec<QuadratureRule>,
    sqrt_weights: Vec<Vec<f64>>,
    multipliers: Vec<Vec<f64>>,
}

impl NeedletSystem {
    /// Validates that rule `j` claims, and passes, exactness
    /// `2^{j+1} - 1`.
    pub fn new(filter: NeedletFilter, level_rules: Vec<QuadratureRule>) -> Result<Self> {
        if level_rules.is_empty() {
            return Err(Error::validation("a needlet system needs at least level 0"));
        }
        for (j, rule) in level_rules.iter().enumerate() {
            let need = level_rule_degree(j);
            rule.require_degree(need)?;
            let report = verify_exactness(rule, need);
            if !report.pass {
                return Err(Error::validation(format!(
                    "level {j} rule fails exactness at degree {need} (residual {:.3e})",
                    report.max_error
                )));
            }
        }
        Ok(Self::assemble(filter, level_rules))
    }

    fn assemble(filter: NeedletFilter, level_rules: Vec<QuadratureRule>) -> Self {
        let sqrt_weights = level_rules
            .iter()
            .map(|r| r.weights().iter().map(|w| w.sqrt()).collect())
            .collect();
        let multipliers = (0..level_rules.len())
            .map(|j| filter_multipliers(level_radius(j), &filter))
            .collect();
        NeedletSystem {
            filter,
            level_rules,
            sqrt_weights,
            multipliers,
        }
    }

    /// Levels `0..=max_level` on tensor rules of exactly the required degree.
    pub fn with_tensor_rules(max_level: usize, filter: NeedletFilter) -> Self {
        let rules = (0..=max_level).map(|j| tensor_rule(level_rule_degree(j))).collect();
        Self::assemble(filter, rules)
    }

    /// Level rules resolved from a design directory.
    pub fn from_library(
        max_level: usize,
        filter: NeedletFilter,
        library: &DesignLibrary,
    ) -> Result<(Self, Vec<RuleSource>)> {
        let mut rules = Vec::with_capacity(max_level + 1);
        let mut sources = Vec::with_capacity(max_level + 1);
        for j in 0..=max_level {
            let (rule, source) = library.resolve(level_rule_degree(j))?;
            rules.push(rule);
            sources.push(source);
        }
        Ok((Self::new(filter, rules)?, sources))
    }

    /// The subsystem of levels `0..=max_level`.
    pub fn truncated(&self, max_level: usize) -> Result<Self> {
        self.check_level(max_level)?;
        Ok(Self::assemble(self.filter.clone(), self.level_rules[..=max_level].to_vec()))
    }

    pub fn max_level(&self) -> usize {
        self.level_rules.len() - 1
    }

    pub fn filter(&self) -> &NeedletFilter {
        &self.filter
    }

    pub fn level_rule(&self, j: usize) -> &QuadratureRule {
        &self.level_rules[j]
    }

    /// `N_j` for every level.
    pub fn level_sizes(&self) -> Vec<usize> {
        self.level_rules.iter().map(|r| r.len()).collect()
    }

    pub fn total_needlets(&self) -> usize {
        self.level_rules.iter().map(|r| r.len()).sum()
    }

    /// Degree `2^J - 1` of the order-`J` approximation.
    pub fn approximation_degree(&self) -> usize {
        level_degree(self.max_level())
    }

    pub fn required_discretisation_degree(&self) -> usize {
        discretisation_degree(self.max_level())
    }

    /// The zonal kernel `v_{2^{j-1}, h}` of level `j`.
    pub fn level_kernel(&self, j: usize) -> ZonalKernel {
        ZonalKernel::filtered(level_radius(j), &self.filter).expect("level radius is nonnegative")
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j > self.max_level() {
            return Err(Error::Index(format!("level {j} exceeds max level {}", self.max_level())));
        }
        Ok(())
    }

    /// `ψ_jk(p)` by direct kernel evaluation; `k` is zero-based.
    pub fn needlet_eval(&self, j: usize, k: usize, p: &UnitVector) -> Result<f64> {
        self.check_level(j)?;
        let rule = &self.level_rules[j];
        let center = rule
            .nodes()
            .get(k)
            .ok_or_else(|| Error::Index(format!("needlet {k} outside level {j} with {} nodes", rule.len())))?;
        let kernel = self.level_kernel(j);
        Ok(self.sqrt_weights[j][k] * kernel.eval_unchecked(p.dot(center)))
    }

    /// Center `x_jk` of needlet `(j, k)`.
    pub fn center(&self, j: usize, k: usize) -> Option<&UnitVector> {
        self.level_rules.get(j).and_then(|r| r.nodes().get(k))
    }

    /// Discrete needlet coefficients `Σ_i w_i T(y_i) ψ_jk(y_i)` for samples
    /// at the nodes of `rule`, which must be exact to `3 · 2^{J-1} - 1`.
    pub fn analyze(&self, samples: &[f64], rule: &QuadratureRule) -> Result<NeedletCoefficients> {
        self.analyze_with(samples, rule, DegreePolicy::Enforce)
    }

    pub fn analyze_with(
        &self,
        samples: &[f64],
        rule: &QuadratureRule,
        policy: DegreePolicy,
    ) -> Result<NeedletCoefficients> {
        let under_resolved = policy.check(rule, self.required_discretisation_degree())?;
        let fourier = Expansion::project(samples, rule.weights(), rule.point_set(), self.approximation_degree())?;
        let levels = (0..=self.max_level())
            .map(|j| self.coefficients_from_fourier(&fourier, j))
            .collect();
        Ok(NeedletCoefficients { levels, under_resolved })
    }

    /// Level-`j` coefficients from discrete Fourier coefficients `â_lm`:
    /// `β_jk = sqrt(w_jk) Σ_l h(l/R) Σ_m â_lm Y_lm(x_jk)`.
    fn coefficients_from_fourier(&self, fourier: &Expansion, j: usize) -> Vec<f64> {
        let mult = &self.multipliers[j];
        let mut filtered = fourier.resized(mult.len() - 1);
        filtered.scale_degrees(|l| mult[l]);
        let values = filtered.evaluate(self.level_rules[j].point_set());
        values.iter().zip(&self.sqrt_weights[j]).map(|(v, s)| v * s).collect()
    }

    fn check_shape(&self, coeffs: &NeedletCoefficients) -> Result<()> {
        if coeffs.levels.len() != self.level_rules.len() {
            return Err(Error::Shape {
                expected: self.level_rules.len(),
                got: coeffs.levels.len(),
            });
        }
        for (level, rule) in coeffs.levels.iter().zip(&self.level_rules) {
            if level.len() != rule.len() {
                return Err(Error::Shape {
                    expected: rule.len(),
                    got: level.len(),
                });
            }
        }
        Ok(())
    }

    /// Spherical harmonic coefficients of `Σ_{j ∈ levels} Σ_k β_jk ψ_jk`.
    pub fn synthesis_expansion(
        &self,
        coeffs: &NeedletCoefficients,
        levels: impl IntoIterator<Item = usize>,
    ) -> Result<Expansion> {
        self.check_shape(coeffs)?;
        let mut total = Expansion::zeros(0);
        for j in levels {
            self.check_level(j)?;
            let beta = &coeffs.levels[j];
            if beta.iter().all(|b| *b == 0.0) {
                continue;
            }
            let mult = &self.multipliers[j];
            let rule = &self.level_rules[j];
            let mut part = Expansion::project(beta, &self.sqrt_weights[j], rule.point_set(), mult.len() - 1)?;
            part.scale_degrees(|l| mult[l]);
            total.add_assign(&part);
        }
        Ok(total)
    }

    /// `Σ_{j ≤ J} Σ_k β_jk ψ_jk(p)` at every point.
    pub fn synthesize(&self, coeffs: &NeedletCoefficients, points: &PointSet) -> Result<Vec<f64>> {
        Ok(self
            .synthesis_expansion(coeffs, 0..=self.max_level())?
            .evaluate(points))
    }

    /// The level-`j` part `U_j = Σ_k β_jk ψ_jk` at every point.
    pub fn level_contribution(&self, coeffs: &NeedletCoefficients, j: usize, points: &PointSet) -> Result<Vec<f64>> {
        self.check_level(j)?;
        Ok(self.synthesis_expansion(coeffs, [j])?.evaluate(points))
    }

    /// Keeps every needlet at levels `≤ j_split` and, above it, only those
    /// centered within geodesic distance `radius` of `center`.
    pub fn localise(&self, center: UnitVector, radius: f64, j_split: usize) -> Result<LocalisedSystem<'_>> {
        if !(radius > 0.0 && radius <= std::f64::consts::PI) {
            return Err(Error::domain(format!("cap radius {radius} must lie in (0, pi]")));
        }
        self.check_level(j_split)?;
        let masks: Vec<Vec<bool>> = self
            .level_rules
            .iter()
            .enumerate()
            .map(|(j, rule)| {
                rule.nodes()
                    .iter()
                    .map(|x| j <= j_split || x.distance(&center) <= radius)
                    .collect()
            })
            .collect();
        Ok(LocalisedSystem {
            system: self,
            center,
            radius,
            j_split,
            masks,
        })
    }
}

/// Discrete needlet coefficients, one vector per level.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedletCoefficients {
    levels: Vec<Vec<f64>>,
    under_resolved: bool,
}

impl NeedletCoefficients {
    pub fn new(levels: Vec<Vec<f64>>) -> Self {
        NeedletCoefficients {
            levels,
            under_resolved: false,
        }
    }

    pub fn zeros(system: &NeedletSystem) -> Self {
        Self::new(system.level_sizes().into_iter().map(|n| vec![0.0; n]).collect())
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j]
    }

    pub fn level_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.levels[j]
    }

    /// Computed with a discretisation rule below the required degree.
    pub fn under_resolved(&self) -> bool {
        self.under_resolved
    }

    /// CSV `j,k,beta` with zero-based `j`, `k` and 17 significant digits.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("j,k,beta\n");
        for (j, level) in self.levels.iter().enumerate() {
            for (k, b) in level.iter().enumerate() {
                out.push_str(&format!("{j},{k},{b:.16e}\n"));
            }
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut levels: Vec<Vec<f64>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if lineno == 1 {
                if line.trim() != "j,k,beta" {
                    return Err(parse_err(1, format!("expected header j,k,beta, found {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(parse_err(lineno, format!("expected 3 fields, found {}", fields.len())));
            }
            let j: usize = fields[0].trim().parse().map_err(|e| parse_err(lineno, format!("bad level: {e}")))?;
            let k: usize = fields[1].trim().parse().map_err(|e| parse_err(lineno, format!("bad index: {e}")))?;
            let b: f64 = fields[2].trim().parse().map_err(|e| parse_err(lineno, format!("bad value: {e}")))?;
            if j == levels.len() && k == 0 {
                levels.push(Vec::new());
            } else if !(j + 1 == levels.len() && k == levels[j].len()) {
                return Err(parse_err(lineno, format!("entry ({j},{k}) out of order")));
            }
            levels[j].push(b);
        }
        Ok(Self::new(levels))
    }
}

/// A needlet system restricted to a spherical cap above level `j_split`.
#[derive(Debug, Clone)]
pub struct LocalisedSystem<'a> {
    system: &'a NeedletSystem,
    center: UnitVector,
    radius: f64,
    j_split: usize,
    masks: Vec<Vec<bool>>,
}

impl LocalisedSystem<'_> {
    pub fn system(&self) -> &NeedletSystem {
        self.system
    }

    pub fn center(&self) -> UnitVector {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn j_split(&self) -> usize {
        self.j_split
    }

    pub fn is_retained(&self, j: usize, k: usize) -> bool {
        self.masks.get(j).and_then(|m| m.get(k)).copied().unwrap_or(false)
    }

    /// Retained needlets per level.
    pub fn level_retained(&self) -> Vec<usize> {
        self.masks.iter().map(|m| m.iter().filter(|b| **b).count()).collect()
    }

    pub fn retained_count(&self) -> usize {
        self.level_retained().iter().sum()
    }

    pub fn total_count(&self) -> usize {
        self.system.total_needlets()
    }

    /// Zeros every dropped coefficient.
    pub fn restrict(&self, coeffs: &NeedletCoefficients) -> Result<NeedletCoefficients> {
        self.system.check_shape(coeffs)?;
        let levels = coeffs
            .levels
            .iter()
            .zip(&self.masks)
            .map(|(level, mask)| {
                level
                    .iter()
                    .zip(mask)
                    .map(|(b, keep)| if *keep { *b } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(NeedletCoefficients {
            levels,
            under_resolved: coeffs.under_resolved,
        })
    }

    /// Coefficients of the retained needlets; dropped ones are zero.
    pub fn analyze_with(
        &self,
        samples: &[f64],
        rule: &QuadratureRule,
        policy: DegreePolicy,
    ) -> Result<NeedletCoefficients> {
        self.restrict(&self.system.analyze_with(samples, rule, policy)?)
    }

    pub fn analyze(&self, samples: &[f64], rule: &QuadratureRule) -> Result<NeedletCoefficients> {
        self.analyze_with(samples, rule, DegreePolicy::Enforce)
    }

    /// Synthesis over retained needlets only.
    pub fn synthesize(&self, coeffs: &NeedletCoefficients, points: &PointSet) -> Result<Vec<f64>> {
        self.system.synthesize(&self.restrict(coeffs)?, points)
    }
}

/// Degree the discretisation rule needs for a filtered hyperinterpolant of
/// radius `radius`: `3R - 1` rounded up, matching `3 · 2^{J-1} - 1` at
/// `R = 2^{J-1}`.
pub fn filtered_hyper_degree(radius: f64) -> usize {
    if radius < 1.0 {
        0
    } else {
        (3.0 * radius).ceil() as usize - 1
    }
}

/// Filtered hyperinterpolation `Σ_i w_i T(y_i) v_{R,f}(y_i · p)` by direct
/// kernel sums.
pub fn filtered_hyper(
    samples: &[f64],
    rule: &QuadratureRule,
    radius: f64,
    filter: &dyn Filter,
    points: &PointSet,
) -> Result<Vec<f64>> {
    Ok(filtered_hyper_with(samples, rule, radius, filter, points, DegreePolicy::Enforce)?.values)
}

pub fn filtered_hyper_with(
    samples: &[f64],
    rule: &QuadratureRule,
    radius: f64,
    filter: &dyn Filter,
    points: &PointSet,
    policy: DegreePolicy,
) -> Result<Approximation> {
    if samples.len() != rule.len() {
        return Err(Error::Shape {
            expected: rule.len(),
            got: samples.len(),
        });
    }
    let under_resolved = policy.check(rule, filtered_hyper_degree(radius))?;
    let kernel = ZonalKernel::filtered(radius, filter)?;
    let weighted: Vec<f64> = samples.iter().zip(rule.weights()).map(|(t, w)| t * w).collect();
    let nodes = rule.nodes();
    let values = points
        .points()
        .par_iter()
        .map(|p| {
            nodes
                .iter()
                .zip(&weighted)
                .map(|(y, wt)| wt * kernel.eval_unchecked(y.dot(p)))
                .sum()
        })
        .collect();
    Ok(Approximation { values, under_resolved })
}
