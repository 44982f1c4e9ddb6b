use std::path::Path;

use needlets::estimate::{sampled, FieldModel};
use needlets::needlet::{discretisation_degree, level_rule_degree};
use needlets::{
    convergence_study, sample_field, Approximator, CosineCap, DegreePolicy, DesignLibrary, Error,
    FieldSample, HyperApproximator, LocalNeedletApproximator, NeedletApproximator, NeedletSystem, QuadratureRule,
    Result, RuleSource, StudyConfig, UnitVector,
};

use crate::config::{self, ApproxArgs, Cli, Command, ConvergeArgs, Method, QuadArgs, SampleArgs};
use crate::verify;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(args) => sample(args),
        Command::Approx(args) => approx(args),
        Command::Converge(args) => converge(args),
        Command::Verify(args) => verify::run(args),
    }
}

/// Rule lookup with fallback notices on stderr.
struct Quadratures {
    library: DesignLibrary,
    dir: Option<String>,
    no_fallback: bool,
}

impl Quadratures {
    fn open(args: &QuadArgs) -> Result<Self> {
        if args.no_fallback && args.quad_dir.is_none() {
            return Err(Error::Validation("--no-fallback requires --quad-dir".into()));
        }
        let library = match &args.quad_dir {
            Some(dir) => DesignLibrary::scan(dir)?,
            None => DesignLibrary::empty(),
        };
        Ok(Quadratures {
            library,
            dir: args.quad_dir.as_ref().map(|d| d.display().to_string()),
            no_fallback: args.no_fallback,
        })
    }

    /// Refuses up front when a degree has no design and fallback is off.
    fn require(&self, degree: usize, purpose: &str) -> Result<()> {
        if !self.no_fallback || self.library.entries().iter().any(|e| e.degree >= degree) {
            return Ok(());
        }
        Err(Error::Validation(format!(
            "no design of degree >= {degree} in {} ({purpose}); add a design_L{degree}_N<count>.txt file or drop --no-fallback",
            self.dir.as_deref().unwrap_or("")
        )))
    }

    fn notice(&self, source: &RuleSource, degree: usize, purpose: &str) {
        if *source == RuleSource::Tensor && self.dir.is_some() {
            eprintln!("notice: no design of degree >= {degree} found; {purpose} uses a tensor Gauss-Legendre rule");
        }
    }

    fn rule(&self, degree: usize, purpose: &str) -> Result<QuadratureRule> {
        self.require(degree, purpose)?;
        let (rule, source) = self.library.resolve(degree)?;
        self.notice(&source, degree, purpose);
        Ok(rule)
    }

    fn system(&self, max_level: usize, kappa: usize) -> Result<NeedletSystem> {
        for j in 0..=max_level {
            self.require(level_rule_degree(j), &format!("needlet level {j}"))?;
        }
        let (system, sources) = NeedletSystem::from_library(max_level, config::filter(kappa)?, &self.library)?;
        for (j, source) in sources.iter().enumerate() {
            self.notice(source, level_rule_degree(j), &format!("needlet level {j}"));
        }
        Ok(system)
    }

    fn describe(&self) -> String {
        match &self.dir {
            Some(dir) => format!("designs:{dir}"),
            None => "tensor".into(),
        }
    }
}

fn sample(args: SampleArgs) -> Result<()> {
    let spectrum = args.field.spectrum()?;
    let field = sample_field(&spectrum, args.field.seed, args.field.mu0);
    field.write_csv(&args.out)?;
    println!(
        "wrote {} coefficients (M={}) to {}",
        field.expansion().coeffs().len(),
        spectrum.max_degree(),
        args.out.display()
    );
    Ok(())
}

fn approx(args: ApproxArgs) -> Result<()> {
    // validate everything before any sampling or quadrature work
    config::check_level(args.level)?;
    config::filter(args.kappa)?;
    config::check_cap_radius(args.cap_radius)?;
    let grid = config::grid(&args.grid)?;
    if args.method == Method::NeedletLocal && args.j_split > args.level {
        return Err(Error::Validation(format!(
            "--j-split {} exceeds --J {}",
            args.j_split, args.level
        )));
    }
    let spectrum = args.field.spectrum()?;
    let quads = Quadratures::open(&args.quad)?;
    let policy = if args.allow_underresolved {
        DegreePolicy::Override
    } else {
        DegreePolicy::Enforce
    };

    let field = match &args.field_file {
        Some(path) => FieldSample::read_csv(path)?,
        None => sample_field(&spectrum, args.field.seed, args.field.mu0),
    };
    let model = if args.with_cap {
        FieldModel::WithCap(CosineCap::new(UnitVector::NORTH, args.cap_radius)?)
    } else {
        FieldModel::Gaussian
    };

    let approximator: Box<dyn Approximator> = match args.method {
        Method::Hyper => {
            let degree = 1usize << args.level;
            let quad_degree = args.quad_degree.unwrap_or(2 * degree);
            let rule = quads.rule(quad_degree, "hyperinterpolation")?;
            Box::new(HyperApproximator::new(degree, rule, policy)?)
        }
        Method::Needlet | Method::NeedletLocal => {
            let quad_degree = args.quad_degree.unwrap_or(discretisation_degree(args.level));
            quads.require(quad_degree, &format!("discretisation at J={}", args.level))?;
            let system = quads.system(args.level, args.kappa)?;
            let rule = quads.rule(quad_degree, "discretisation")?;
            let inner = NeedletApproximator::new(system, rule, policy)?;
            if args.method == Method::Needlet {
                Box::new(inner)
            } else {
                let local = LocalNeedletApproximator::new(inner, UnitVector::NORTH, args.cap_radius, args.j_split)?;
                let (kept, total) = local.counts();
                println!("retained needlets: {kept} of {total}");
                Box::new(local)
            }
        }
    };

    let points = grid.points();
    let truth = model.eval(&field, &points);
    let values = sampled(approximator.as_ref(), model)(&field, &points)?;
    let field_echo = match &args.field_file {
        Some(path) => format!("field={}", path.display()),
        None => args.field.echo(),
    };
    let header = format!(
        "needlets approx method={} {} J={} kappa={} j_split={} cap_radius={} with_cap={} grid={} quad={} quad_degree={} under_resolved={}",
        args.method,
        field_echo,
        args.level,
        args.kappa,
        args.j_split,
        args.cap_radius,
        args.with_cap,
        args.grid,
        quads.describe(),
        approximator.discretisation().degree(),
        approximator.under_resolved()
    );
    grid.write_csv(&args.out, &header, &truth, &values)?;

    let sup = truth.iter().zip(&values).fold(0.0f64, |m, (t, a)| m.max((t - a).abs()));
    let rms = (truth.iter().zip(&values).map(|(t, a)| (t - a).powi(2)).sum::<f64>() / truth.len() as f64).sqrt();
    println!("{}", approximator.describe());
    println!("grid {}: max |error| = {sup:.6e}, rms error = {rms:.6e}", args.grid);
    if approximator.under_resolved() {
        println!("warning: discretisation rule is below the required degree; results are under-resolved");
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<()> {
    let levels = args.levels.0.clone();
    config::check_level(*levels.end())?;
    let mut study_config = StudyConfig::new(args.field.delta, args.field.s, args.field.max_degree, levels.clone());
    study_config.mu0 = args.field.mu0;
    study_config.seed = args.field.seed;
    study_config.kappa = args.kappa;
    study_config.samples = args.samples;
    study_config.eval_degree = args.eval_degree;
    study_config.fit = args.fit.0.clone();
    args.field.spectrum()?;
    study_config.validate()?;
    if args.eval_degree < discretisation_degree(*levels.end()) {
        eprintln!(
            "notice: --eval-degree {} is below the discretisation degree {} of the finest level",
            args.eval_degree,
            discretisation_degree(*levels.end())
        );
    }

    let quads = Quadratures::open(&args.quad)?;
    for j in 0..=*levels.end() {
        quads.require(level_rule_degree(j), &format!("needlet level {j}"))?;
    }
    for j in levels.clone() {
        quads.require(discretisation_degree(j), &format!("discretisation at J={j}"))?;
    }
    quads.require(args.eval_degree, "error evaluation")?;

    let study = convergence_study(&study_config, &quads.library)?;
    for source in study.rule_sources.iter().filter(|s| s.contains("tensor")) {
        if quads.dir.is_some() {
            eprintln!("notice: {source}");
        }
    }
    if is_json(&args.out) {
        study.write_json(&args.out)?;
    } else {
        study.write_csv(&args.out)?;
    }

    println!("{:>3} {:>14} {:>14}", "J", "rmse", "var");
    for row in &study.rows {
        println!("{:>3} {:>14.6e} {:>14.6e}", row.level, row.report.rmse, row.report.var);
    }
    match study.slope {
        Some(slope) => println!("slope of log2 rmse over J={}: {slope:.4}", args.fit),
        None => println!("slope: not applicable (fewer than two levels in the fit range)"),
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

