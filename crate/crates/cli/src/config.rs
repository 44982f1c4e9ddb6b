use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use needlets::{AngularPowerSpectrum, Error, LatLonGrid, NeedletFilter, Result};

/// Needlet approximation of Gaussian random fields on the sphere.
#[derive(Debug, Parser)]
#[command(name = "needlets", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw one field realisation and write its coefficients.
    Sample(SampleArgs),
    /// Approximate a realisation and write truth, approximation and error on a lat-lon grid.
    Approx(ApproxArgs),
    /// Monte-Carlo mean L2 errors of needlet approximations over a range of levels.
    Converge(ConvergeArgs),
    /// Run the built-in consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Spectrum scale delta in A_l = (1 + delta*l)^-(2s+2).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta: f64,
    /// Smoothness s.
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub s: f64,
    /// Truncation degree.
    #[arg(long = "M", default_value_t = 300)]
    pub max_degree: usize,
    /// Mean of the field.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu0: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SpectrumArgs {
    pub fn spectrum(&self) -> Result<AngularPowerSpectrum> {
        if !self.mu0.is_finite() {
            return Err(Error::Validation(format!("--mu0 must be finite, got {}", self.mu0)));
        }
        AngularPowerSpectrum::new(self.delta, self.s, self.max_degree)
    }

    pub fn echo(&self) -> String {
        format!(
            "delta={} s={} M={} mu0={} seed={}",
            self.delta, self.s, self.max_degree, self.mu0, self.seed
        )
    }
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Directory of design_L<degree>_N<count>.txt point sets.
    #[arg(long)]
    pub quad_dir: Option<PathBuf>,
    /// Fail instead of falling back to tensor Gauss-Legendre rules.
    #[arg(long)]
    pub no_fallback: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub field: SpectrumArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Needlet,
    Hyper,
    NeedletLocal,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Needlet => "needlet",
            Method::Hyper => "hyper",
            Method::NeedletLocal => "needlet-local",
        })
    }
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub field: SpectrumArgs,
    /// Coefficient file from `sample`; overrides the spectrum flags.
    #[arg(long = "field")]
    pub field_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Needlet)]
    pub method: Method,
    /// Needlet order J; hyperinterpolation uses degree 2^J.
    #[arg(long = "J", default_value_t = 4)]
    pub level: usize,
    /// Filter smoothness.
    #[arg(long, default_value_t = needlets::DEFAULT_KAPPA)]
    pub kappa: usize,
    /// Highest level kept everywhere by needlet-local.
    #[arg(long, default_value_t = 4)]
    pub j_split: usize,
    /// Radius of the north-pole cap used by needlet-local and --with-cap.
    #[arg(long, default_value_t = FRAC_PI_3, allow_negative_numbers = true)]
    pub cap_radius: f64,
    /// Add a cosine cap of radius --cap-radius at the north pole to the field.
    #[arg(long)]
    pub with_cap: bool,
    /// Grid as <latitudes>x<longitudes>.
    #[arg(long, default_value = "181x360")]
    pub grid: String,
    /// Exactness degree of the discretisation rule (default: the required degree).
    #[arg(long)]
    pub quad_degree: Option<usize>,
    /// Accept a discretisation rule below the required degree.
    #[arg(long)]
    pub allow_underresolved: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub field: SpectrumArgs,
    /// Levels, as `a..b` or a single level.
    #[arg(long = "J", default_value = "0..7")]
    pub levels: LevelRange,
    /// Levels entering the slope fit.
    #[arg(long, default_value = "3..7")]
    pub fit: LevelRange,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = needlets::DEFAULT_KAPPA)]
    pub kappa: usize,
    /// Exactness degree of the rule errors are measured with.
    #[arg(long, default_value_t = 301)]
    pub eval_degree: usize,
    #[command(flatten)]
    pub quad: QuadArgs,
    /// Output table; `.json` selects JSON, anything else CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Highest needlet level exercised.
    #[arg(long = "J", default_value_t = 4)]
    pub level: usize,
    #[arg(long, default_value_t = needlets::DEFAULT_KAPPA)]
    pub kappa: usize,
    /// Also check every design file in this directory at its stated degree.
    #[arg(long)]
    pub quad_dir: Option<PathBuf>,
}

/// Inclusive level range, parsed from `a..b` or `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelRange(pub RangeInclusive<usize>);

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("invalid level range {s:?}"));
        let range = match s.split_once("..") {
            Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
            None => {
                let j = parse(s)?;
                j..=j
            }
        };
        if range.is_empty() {
            return Err(format!("empty level range {s:?}"));
        }
        Ok(LevelRange(range))
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.0.start(), self.0.end())
    }
}

/// Largest level accepted on the command line; level `J` rules hold
/// about `2^{2J+1}` nodes.
pub const MAX_LEVEL: usize = 10;

pub fn check_level(j: usize) -> Result<()> {
    if j > MAX_LEVEL {
        return Err(Error::Validation(format!("--J {j} exceeds the supported maximum {MAX_LEVEL}")));
    }
    Ok(())
}

pub fn filter(kappa: usize) -> Result<NeedletFilter> {
    NeedletFilter::new(kappa)
}

pub fn check_cap_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= PI) {
        return Err(Error::Validation(format!("--cap-radius {r} must lie in (0, pi]")));
    }
    Ok(())
}

pub fn grid(spec: &str) -> Result<LatLonGrid> {
    LatLonGrid::parse(spec)
}
