//! Quick self-checks of the numerical building blocks.

use needlets::kernel::filter_multipliers;
use needlets::needlet::{level_radius, level_rule_degree};
use needlets::{
    filtered_kernel, legendre_normalized, sph_harm_basis, tensor_rule, verify_exactness, DesignLibrary, Error,
    Expansion, NeedletSystem, PointSet, Result, UnitVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{self, VerifyArgs};

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, worst: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        pass: worst < tol,
        detail: format!("max deviation {worst:.2e} (tolerance {tol:.0e})"),
    }
}

pub fn run(args: VerifyArgs) -> Result<()> {
    if args.level > 6 {
        return Err(Error::Validation(format!("verify supports --J up to 6, got {}", args.level)));
    }
    let filter = config::filter(args.kappa)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checks = Vec::new();

    for degree in [1, 3, 7, 15, 31, 63, 127] {
        let report = verify_exactness(&tensor_rule(degree), degree);
        checks.push(check(format!("tensor rule exact to degree {degree}"), report.max_error, 1e-9));
    }
    if let Some(dir) = &args.quad_dir {
        for entry in DesignLibrary::scan(dir)?.entries() {
            let rule = needlets::load_pointset(&entry.path, entry.degree)?;
            let report = verify_exactness(&rule, entry.degree);
            checks.push(check(format!("design {} exact to degree {}", entry.path.display(), entry.degree), report.max_error, 1e-9));
        }
    }

    // h(t)² + h(2t)² = 1 on [1/2, 1]
    let worst = (0..=1000)
        .map(|i| {
            let t = 0.5 + 0.5 * i as f64 / 1000.0;
            (filter.h(t).powi(2) + filter.h(2.0 * t).powi(2) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    checks.push(check("filter partition of unity", worst, 1e-14));

    // level multipliers h² telescope to H(l / 2^{J-1})
    let big_h = filter.big_h();
    let squared = filter.squared();
    let top = level_radius(args.level);
    let mut worst = 0.0f64;
    for l in 0..(2usize << args.level) {
        let sum: f64 = (0..=args.level)
            .map(|j| filter_multipliers(level_radius(j), &squared).get(l).copied().unwrap_or(0.0))
            .sum();
        let expected = if top < 1.0 { if l == 0 { 1.0 } else { 0.0 } } else { big_h.try_eval(l as f64 / top)? };
        worst = worst.max((sum - expected).abs());
    }
    checks.push(check(format!("level filters sum to H up to J={}", args.level), worst, 1e-13));

    // addition theorem: Σ_m Y_lm(x)Y_lm(y) = (2l+1) P_l(x·y)
    let lmax = 32;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let x = UnitVector::random(&mut rng);
        let y = UnitVector::random(&mut rng);
        let (bx, by) = (sph_harm_basis(lmax, &x), sph_harm_basis(lmax, &y));
        for l in 0..=lmax {
            let block = l * l..(l + 1) * (l + 1);
            let sum: f64 = bx[block.clone()].iter().zip(&by[block]).map(|(a, b)| a * b).sum();
            worst = worst.max((sum - (2 * l + 1) as f64 * legendre_normalized(l, x.dot(&y))?).abs());
        }
    }
    checks.push(check(format!("addition theorem up to degree {lmax}"), worst, 1e-9));

    let system = NeedletSystem::with_tensor_rules(args.level, filter.clone());
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let x = UnitVector::random(&mut rng);
        let y = UnitVector::random(&mut rng);
        for j in 0..=args.level {
            let n = system.level_rule(j).len();
            let mut sum = 0.0;
            for k in 0..n {
                sum += system.needlet_eval(j, k, &x)? * system.needlet_eval(j, k, &y)?;
            }
            let expected = filtered_kernel(level_radius(j), &squared, x.dot(&y))?;
            worst = worst.max((sum - expected).abs() / expected.abs().max(1.0));
        }
    }
    checks.push(check(
        format!("needlet sums match level kernels up to J={} (rules exact to {})", args.level, level_rule_degree(args.level)),
        worst,
        1e-9,
    ));

    if args.level >= 1 {
        let degree = 1usize << (args.level - 1);
        let n = (degree + 1) * (degree + 1);
        let poly = Expansion::from_coeffs(degree, (0..n).map(|_| rng.random::<f64>() - 0.5).collect())?;
        let rule = tensor_rule(system.required_discretisation_degree());
        let pts = PointSet::from_points((0..100).map(|_| UnitVector::random(&mut rng)).collect());
        let coeffs = system.analyze(&poly.evaluate(rule.point_set()), &rule)?;
        let approx = system.synthesize(&coeffs, &pts)?;
        let worst = approx.iter().zip(poly.evaluate(&pts)).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        checks.push(check(format!("reproduces degree-{degree} polynomials at J={}", args.level), worst, 1e-8));
    }

    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if failed > 0 {
        return Err(Error::Validation(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
