//! Hyperinterpolation, Monte-Carlo mean L² errors and convergence studies.

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{composite_field, eval_field, field_rng, sample_field_with, AngularPowerSpectrum, CosineCap, FieldSample};
use crate::filter::NeedletFilter;
use crate::harmonics::Expansion;
use crate::needlet::{discretisation_degree, Approximation, DegreePolicy, NeedletSystem};
use crate::quadrature::{DesignLibrary, QuadratureRule};
use crate::sphere::{PointSet, UnitVector};

/// Degree-`L` hyperinterpolant `Σ_{l ≤ L} Σ_m â_lm Y_lm(p)`, with `â_lm`
/// computed by `rule`, which must be exact to `2L`.
pub fn hyperinterpolate(samples: &[f64], rule: &QuadratureRule, degree: usize, points: &PointSet) -> Result<Vec<f64>> {
    Ok(hyperinterpolate_with(samples, rule, degree, points, DegreePolicy::Enforce)?.values)
}

pub fn hyperinterpolate_with(
    samples: &[f64],
    rule: &QuadratureRule,
    degree: usize,
    points: &PointSet,
    policy: DegreePolicy,
) -> Result<Approximation> {
    let under_resolved = policy.check(rule, 2 * degree)?;
    let fourier = Expansion::project(samples, rule.weights(), rule.point_set(), degree)?;
    Ok(Approximation {
        values: fourier.evaluate(points),
        under_resolved,
    })
}

/// A linear approximation scheme driven by samples at its own
/// discretisation nodes.
pub trait Approximator: Sync {
    fn describe(&self) -> String;

    fn discretisation(&self) -> &QuadratureRule;

    /// Approximation at `points` from samples at the discretisation nodes.
    fn approximate(&self, samples: &[f64], points: &PointSet) -> Result<Vec<f64>>;

    /// True when the discretisation rule is below the required degree.
    fn under_resolved(&self) -> bool;
}

/// The fully discrete needlet approximation of order `J`.
#[derive(Debug, Clone)]
pub struct NeedletApproximator {
    system: NeedletSystem,
    rule: QuadratureRule,
    policy: DegreePolicy,
    under_resolved: bool,
}

impl NeedletApproximator {
    pub fn new(system: NeedletSystem, rule: QuadratureRule, policy: DegreePolicy) -> Result<Self> {
        let under_resolved = policy.check(&rule, system.required_discretisation_degree())?;
        Ok(NeedletApproximator {
            system,
            rule,
            policy,
            under_resolved,
        })
    }

    pub fn system(&self) -> &NeedletSystem {
        &self.system
    }
}

impl Approximator for NeedletApproximator {
    fn describe(&self) -> String {
        format!("needlet J={}", self.system.max_level())
    }

    fn discretisation(&self) -> &QuadratureRule {
        &self.rule
    }

    fn approximate(&self, samples: &[f64], points: &PointSet) -> Result<Vec<f64>> {
        let coeffs = self.system.analyze_with(samples, &self.rule, self.policy)?;
        self.system.synthesize(&coeffs, points)
    }

    fn under_resolved(&self) -> bool {
        self.under_resolved
    }
}

/// Needlet approximation using all levels up to `j_split` and only
/// needlets centered in a cap above it.
#[derive(Debug, Clone)]
pub struct LocalNeedletApproximator {
    inner: NeedletApproximator,
    center: UnitVector,
    radius: f64,
    j_split: usize,
}

impl LocalNeedletApproximator {
    pub fn new(inner: NeedletApproximator, center: UnitVector, radius: f64, j_split: usize) -> Result<Self> {
        // validates the cap and split level up front
        inner.system.localise(center, radius, j_split)?;
        Ok(LocalNeedletApproximator {
            inner,
            center,
            radius,
            j_split,
        })
    }

    /// Retained and total needlet counts.
    pub fn counts(&self) -> (usize, usize) {
        let local = self
            .inner
            .system
            .localise(self.center, self.radius, self.j_split)
            .expect("validated on construction");
        (local.retained_count(), local.total_count())
    }
}

impl Approximator for LocalNeedletApproximator {
    fn describe(&self) -> String {
        format!(
            "localised needlet J={} j_split={} radius={}",
            self.inner.system.max_level(),
            self.j_split,
            self.radius
        )
    }

    fn discretisation(&self) -> &QuadratureRule {
        &self.inner.rule
    }

    fn approximate(&self, samples: &[f64], points: &PointSet) -> Result<Vec<f64>> {
        let local = self.inner.system.localise(self.center, self.radius, self.j_split)?;
        let coeffs = local.analyze_with(samples, &self.inner.rule, self.inner.policy)?;
        local.synthesize(&coeffs, points)
    }

    fn under_resolved(&self) -> bool {
        self.inner.under_resolved
    }
}

/// Degree-`L` hyperinterpolation.
#[derive(Debug, Clone)]
pub struct HyperApproximator {
    degree: usize,
    rule: QuadratureRule,
    policy: DegreePolicy,
    under_resolved: bool,
}

impl HyperApproximator {
    pub fn new(degree: usize, rule: QuadratureRule, policy: DegreePolicy) -> Result<Self> {
        let under_resolved = policy.check(&rule, 2 * degree)?;
        Ok(HyperApproximator {
            degree,
            rule,
            policy,
            under_resolved,
        })
    }
}

impl Approximator for HyperApproximator {
    fn describe(&self) -> String {
        format!("hyperinterpolation L={}", self.degree)
    }

    fn discretisation(&self) -> &QuadratureRule {
        &self.rule
    }

    fn approximate(&self, samples: &[f64], points: &PointSet) -> Result<Vec<f64>> {
        Ok(hyperinterpolate_with(samples, &self.rule, self.degree, points, self.policy)?.values)
    }

    fn under_resolved(&self) -> bool {
        self.under_resolved
    }
}

/// The random field a study draws from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldModel {
    Gaussian,
    /// Gaussian field plus a cosine cap.
    WithCap(CosineCap),
}

impl FieldModel {
    pub fn eval(&self, sample: &FieldSample, points: &PointSet) -> Vec<f64> {
        match self {
            FieldModel::Gaussian => eval_field(sample, points),
            FieldModel::WithCap(cap) => composite_field(sample, cap, points),
        }
    }
}

/// Adapts an [`Approximator`] to the per-realisation form used by
/// [`mean_l2_error`]: samples the field at the discretisation nodes, then
/// approximates.
pub fn sampled<'a>(
    approx: &'a dyn Approximator,
    model: FieldModel,
) -> impl Fn(&FieldSample, &PointSet) -> Result<Vec<f64>> + Sync + 'a {
    move |sample, points| {
        let values = model.eval(sample, approx.discretisation().point_set());
        approx.approximate(&values, points)
    }
}

/// Monte-Carlo summary of the per-realisation L² errors `e_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub n: usize,
    /// `mean(e_n²)`.
    pub mse: f64,
    pub rmse: f64,
    /// Sample variance of `e_n` (0 when `n = 1`).
    pub var: f64,
    /// Set when `n = 1`, where no variance can be estimated.
    pub single_sample: bool,
    pub seconds: f64,
    #[serde(skip)]
    pub errors: Vec<f64>,
}

impl ErrorReport {
    pub fn from_errors(errors: Vec<f64>, seconds: f64) -> Self {
        let n = errors.len();
        let mse = errors.iter().map(|e| e * e).sum::<f64>() / n as f64;
        let mean = errors.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        ErrorReport {
            n,
            mse,
            rmse: mse.sqrt(),
            var,
            single_sample: n == 1,
            seconds,
            errors,
        }
    }

    /// Standard error of the mean of `e_n`.
    pub fn mean_standard_error(&self) -> f64 {
        (self.var / self.n as f64).sqrt()
    }

    /// Standard error of [`ErrorReport::var`] from the fourth central moment.
    pub fn variance_standard_error(&self) -> f64 {
        let n = self.n as f64;
        if self.n < 4 {
            return f64::INFINITY;
        }
        let mean = self.errors.iter().sum::<f64>() / n;
        let m4 = self.errors.iter().map(|e| (e - mean).powi(4)).sum::<f64>() / n;
        let s2 = self.var;
        ((m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

/// L² error `sqrt(Σ_i w_i (a_i - b_i)²)` on a quadrature rule.
pub fn l2_error(rule: &QuadratureRule, truth: &[f64], approx: &[f64]) -> f64 {
    rule.weights()
        .iter()
        .zip(truth.iter().zip(approx))
        .map(|(w, (t, a))| w * (t - a) * (t - a))
        .sum::<f64>()
        .sqrt()
}

/// Mean L² error of `approx` over `n` realisations of the Gaussian field;
/// realisation `i` draws from stream `i` of `seed`.
pub fn mean_l2_error<F>(
    approx: F,
    spectrum: &AngularPowerSpectrum,
    mu0: f64,
    n: usize,
    eval_rule: &QuadratureRule,
    seed: u64,
) -> Result<ErrorReport>
where
    F: Fn(&FieldSample, &PointSet) -> Result<Vec<f64>> + Sync,
{
    if n == 0 {
        return Err(Error::validation("sample count must be at least 1"));
    }
    let start = Instant::now();
    let errors = (0..n)
        .into_par_iter()
        .map(|i| {
            let sample = sample_field_with(spectrum, seed, mu0, &mut field_rng(seed, i as u64));
            let truth = eval_field(&sample, eval_rule.point_set());
            let values = approx(&sample, eval_rule.point_set())?;
            Ok(l2_error(eval_rule, &truth, &values))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ErrorReport::from_errors(errors, start.elapsed().as_secs_f64()))
}

/// Least-squares slope of `log₂ y` against `x`; `None` for fewer than two
/// points.
pub fn fit_log2_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.log2()).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1.log2() - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Parameters of a needlet convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub delta: f64,
    pub s: f64,
    #[serde(rename = "M")]
    pub max_degree: usize,
    pub mu0: f64,
    pub kappa: usize,
    pub levels: RangeInclusive<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Exactness of the rule the errors are measured with.
    pub eval_degree: usize,
    /// Levels entering the slope fit (intersected with `levels`).
    pub fit: RangeInclusive<usize>,
}

impl StudyConfig {
    /// `n = 20` realisations, `κ = 5`, errors measured with a degree-301
    /// rule and slopes fitted over `J = 3..=7`.
    pub fn new(delta: f64, s: f64, max_degree: usize, levels: RangeInclusive<usize>) -> Self {
        StudyConfig {
            delta,
            s,
            max_degree,
            mu0: 0.0,
            kappa: crate::filter::DEFAULT_KAPPA,
            levels,
            samples: 20,
            seed: 0,
            eval_degree: 301,
            fit: 3..=7,
        }
    }

    pub fn validate(&self) -> Result<AngularPowerSpectrum> {
        if self.levels.is_empty() {
            return Err(Error::validation("level range is empty"));
        }
        if self.samples == 0 {
            return Err(Error::validation("sample count must be at least 1"));
        }
        NeedletFilter::new(self.kappa)?;
        AngularPowerSpectrum::new(self.delta, self.s, self.max_degree)
    }

    /// One-line `key=value` echo of the configuration.
    pub fn echo(&self) -> String {
        format!(
            "delta={} s={} M={} mu0={} kappa={} J={}..{} n={} seed={} eval_degree={} fit={}..{}",
            self.delta,
            self.s,
            self.max_degree,
            self.mu0,
            self.kappa,
            self.levels.start(),
            self.levels.end(),
            self.samples,
            self.seed,
            self.eval_degree,
            self.fit.start(),
            self.fit.end()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "J")]
    pub level: usize,
    #[serde(flatten)]
    pub report: ErrorReport,
}

/// Error table and fitted rate of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub config: StudyConfig,
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `log₂ rmse` over the fit range; `None` with fewer than two
    /// levels in range.
    pub slope: Option<f64>,
    /// Where each rule came from, for the record.
    pub rule_sources: Vec<String>,
}

impl ConvergenceStudy {
    pub fn row(&self, level: usize) -> Option<&ErrorReport> {
        self.rows.iter().find(|r| r.level == level).map(|r| &r.report)
    }

    /// Slope over an arbitrary sub-range of the computed levels.
    pub fn slope_over(&self, range: RangeInclusive<usize>) -> Option<f64> {
        let pts: Vec<(usize, f64)> = self
            .rows
            .iter()
            .filter(|r| range.contains(&r.level))
            .map(|r| (r.level, r.report.rmse))
            .collect();
        fit_log2_slope(&pts)
    }

    /// `# config` line, then `J,n,mse,rmse,var,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# {}\nJ,n,mse,rmse,var,seconds\n", self.config.echo());
        for r in &self.rows {
            let e = &r.report;
            out.push_str(&format!(
                "{},{},{:.10e},{:.10e},{:.10e},{:.3}\n",
                r.level, e.n, e.mse, e.rmse, e.var, e.seconds
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_csv())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("study serializes");
        write_text(path.as_ref(), &text)
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Mean L² error of the order-`J` needlet approximation for every `J` in
/// the configured range. Each realisation is drawn once and measured at
/// every level, so the rows share their Monte-Carlo noise.
pub fn convergence_study(config: &StudyConfig, library: &DesignLibrary) -> Result<ConvergenceStudy> {
    let spectrum = config.validate()?;
    let filter = NeedletFilter::new(config.kappa)?;
    let levels: Vec<usize> = config.levels.clone().collect();
    let top = *levels.last().expect("nonempty range");
    let (full, level_sources) = NeedletSystem::from_library(top, filter, library)?;
    let mut rule_sources: Vec<String> = level_sources
        .iter()
        .enumerate()
        .map(|(j, s)| format!("level {j}: {s}"))
        .collect();

    let mut setups = Vec::with_capacity(levels.len());
    for &j in &levels {
        let (rule, source) = library.resolve(discretisation_degree(j))?;
        rule_sources.push(format!("discretisation J={j}: {source}"));
        setups.push(NeedletApproximator::new(full.truncated(j)?, rule, DegreePolicy::Enforce)?);
    }
    let (eval_rule, eval_source) = library.resolve(config.eval_degree)?;
    rule_sources.push(format!("evaluation: {eval_source}"));

    let per_sample: Vec<Vec<(f64, f64)>> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let sample = sample_field_with(&spectrum, config.seed, config.mu0, &mut field_rng(config.seed, i as u64));
            let truth = eval_field(&sample, eval_rule.point_set());
            setups
                .iter()
                .map(|approx| {
                    let start = Instant::now();
                    let values = sampled(approx, FieldModel::Gaussian)(&sample, eval_rule.point_set())?;
                    Ok((l2_error(&eval_rule, &truth, &values), start.elapsed().as_secs_f64()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let rows: Vec<ConvergenceRow> = levels
        .iter()
        .enumerate()
        .map(|(col, &level)| {
            let errors = per_sample.iter().map(|s| s[col].0).collect();
            let seconds = per_sample.iter().map(|s| s[col].1).sum();
            ConvergenceRow {
                level,
                report: ErrorReport::from_errors(errors, seconds),
            }
        })
        .collect();
    let mut study = ConvergenceStudy {
        config: config.clone(),
        rows,
        slope: None,
        rule_sources,
    };
    study.slope = study.slope_over(config.fit.clone());
    Ok(study)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;
    use crate::harmonics::coeff_count;
    use crate::quadrature::tensor_rule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> PointSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointSet::from_points((0..n).map(|_| UnitVector::random(&mut rng)).collect())
    }

    #[test]
    fn hyperinterpolation_reproduces_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let poly = Expansion::from_coeffs(9, (0..coeff_count(9)).map(|_| rng.random::<f64>()).collect()).unwrap();
        let q = tensor_rule(18);
        let pts = random_points(30, 2);
        let approx = hyperinterpolate(&poly.evaluate(q.point_set()), &q, 9, &pts).unwrap();
        for (a, b) in approx.iter().zip(poly.evaluate(&pts)) {
            assert!((a - b).abs() < 1e-9);
        }
        for v in hyperinterpolate(&vec![1.5; q.len()], &q, 9, &pts).unwrap() {
            assert!((v - 1.5).abs() < 1e-12);
        }
        assert!(matches!(
            hyperinterpolate(&vec![1.5; q.len()], &q, 10, &pts),
            Err(Error::InsufficientDegree { required: 20, available: 18 })
        ));
        let forced = hyperinterpolate_with(&vec![1.5; q.len()], &q, 10, &pts, DegreePolicy::Override).unwrap();
        assert!(forced.under_resolved);
    }

    #[test]
    fn degree_zero_hyperinterpolant_is_quadrature_mean() {
        let q = tensor_rule(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<f64> = (0..q.len()).map(|_| rng.random()).collect();
        let mean = q.sum_values(&samples);
        for v in hyperinterpolate(&samples, &q, 0, &random_points(5, 4)).unwrap() {
            assert!((v - mean).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_has_zero_error() {
        let spectrum = AngularPowerSpectrum::new(1.0, 1.5, 20).unwrap();
        let rule = tensor_rule(41);
        let report = mean_l2_error(|s, p| Ok(eval_field(s, p)), &spectrum, 0.0, 4, &rule, 9).unwrap();
        assert_eq!(report.mse, 0.0);
        assert_eq!(report.var, 0.0);
        assert!(!report.single_sample);
    }

    #[test]
    fn band_limited_fields_are_reproduced() {
        let levels = 4;
        let spectrum = AngularPowerSpectrum::new(1.0, 1.5, 1 << (levels - 1)).unwrap();
        let system = NeedletSystem::with_tensor_rules(levels, NeedletFilter::default());
        let approx = NeedletApproximator::new(system, tensor_rule(23), DegreePolicy::Enforce).unwrap();
        let report = mean_l2_error(sampled(&approx, FieldModel::Gaussian), &spectrum, 0.5, 5, &tensor_rule(40), 1).unwrap();
        assert!(report.rmse < 1e-8, "rmse {}", report.rmse);
    }

    #[test]
    fn single_sample_is_flagged() {
        let report = ErrorReport::from_errors(vec![0.3], 0.0);
        assert!(report.single_sample);
        assert_eq!(report.var, 0.0);
        assert!((report.rmse - 0.3).abs() < 1e-16);
        let spectrum = AngularPowerSpectrum::new(1.0, 1.5, 4).unwrap();
        assert!(mean_l2_error(|s, p| Ok(eval_field(s, p)), &spectrum, 0.0, 0, &tensor_rule(9), 0).is_err());
    }

    #[test]
    fn report_statistics() {
        let r = ErrorReport::from_errors(vec![1.0, 2.0, 3.0, 4.0], 0.0);
        assert!((r.mse - 7.5).abs() < 1e-15);
        assert!((r.var - 5.0 / 3.0).abs() < 1e-15);
        assert!((r.mean_standard_error() - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(r.variance_standard_error().is_finite());
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(usize, f64)> = (3..=7).map(|j| (j, 5.0 * 2f64.powf(-1.5 * j as f64))).collect();
        assert!((fit_log2_slope(&pts).unwrap() + 1.5).abs() < 1e-12);
        assert_eq!(fit_log2_slope(&pts[..1]), None);
    }

    #[test]
    fn small_convergence_study() {
        let mut config = StudyConfig::new(1.0, 1.5, 24, 0..=3);
        config.samples = 3;
        config.eval_degree = 49;
        config.fit = 1..=3;
        let study = convergence_study(&config, &DesignLibrary::empty()).unwrap();
        assert_eq!(study.rows.len(), 4);
        let rmse: Vec<f64> = study.rows.iter().map(|r| r.report.rmse).collect();
        assert!(rmse.windows(2).all(|w| w[1] < w[0]), "{rmse:?}");
        assert!(study.slope.unwrap() < 0.0);
        let csv = study.to_csv();
        assert!(csv.starts_with("# delta=1 s=1.5 M=24"));
        assert_eq!(csv.lines().nth(1), Some("J,n,mse,rmse,var,seconds"));
        assert_eq!(csv.lines().count(), 6);

        config.levels = 2..=2;
        let single = convergence_study(&config, &DesignLibrary::empty()).unwrap();
        assert_eq!(single.slope, None);
        assert_eq!(single.rows[0].report.errors, study.rows[2].report.errors);

        let dir = tempfile::tempdir().unwrap();
        study.write_json(dir.path().join("c.json")).unwrap();
        let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
        assert_eq!(json["config"]["M"], 24);
        assert_eq!(json["rows"][1]["J"], 1);
        assert!(json["rows"][1]["rmse"].as_f64().unwrap() > 0.0);
        assert!(study.write_csv(dir.path().join("missing").join("c.csv")).unwrap_err().is_io());
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn study_rejects_bad_configs() {
        let mut config = StudyConfig::new(1.0, 1.5, 8, 2..=1);
        assert!(convergence_study(&config, &DesignLibrary::empty()).is_err());
        config.levels = 0..=1;
        config.samples = 0;
        assert!(convergence_study(&config, &DesignLibrary::empty()).is_err());
        config.samples = 1;
        config.delta = -1.0;
        assert!(convergence_study(&config, &DesignLibrary::empty()).is_err());
    }

    #[test]
    fn localised_approximator_with_full_cap_matches_global() {
        let system = NeedletSystem::with_tensor_rules(3, NeedletFilter::default());
        let global = NeedletApproximator::new(system, tensor_rule(11), DegreePolicy::Enforce).unwrap();
        let local = LocalNeedletApproximator::new(global.clone(), UnitVector::NORTH, std::f64::consts::PI, 1).unwrap();
        assert_eq!(local.counts(), (170, 170));
        let sample = sample_field(&AngularPowerSpectrum::new(1.0, 1.5, 12).unwrap(), 2, 0.0);
        let pts = random_points(20, 5);
        let a = sampled(&global, FieldModel::Gaussian)(&sample, &pts).unwrap();
        let b = sampled(&local, FieldModel::Gaussian)(&sample, &pts).unwrap();
        assert_eq!(a, b);
    }
}
