//! Needlet approximation of random fields on the unit sphere `S²`.
//!
//! Inner products use the normalized surface measure, so quadrature
//! weights sum to 1 and `Y_{0,1} = 1`.

pub mod error;
pub mod estimate;
pub mod field;
pub mod filter;
pub mod grid;
pub mod harmonics;
pub mod kernel;
pub mod needlet;
pub mod quadrature;
pub mod sphere;

pub use error::{Error, Result};
pub use estimate::{
    convergence_study, hyperinterpolate, mean_l2_error, Approximator, ConvergenceStudy, ErrorReport, FieldModel,
    HyperApproximator, LocalNeedletApproximator, NeedletApproximator, StudyConfig,
};
pub use field::{
    aps_eval, ccap_eval, composite_field, covariance_value, eval_field, sample_field, sobolev_norm_sq,
    AngularPowerSpectrum, CosineCap, FieldSample,
};
pub use filter::{eval_big_h, make_needlet_filter, Filter, FilterH, NeedletFilter, DEFAULT_KAPPA};
pub use harmonics::{harmonic_dimension, legendre_normalized, sph_harm_basis, Expansion, HarmonicIndex};
pub use grid::LatLonGrid;
pub use kernel::{filtered_kernel, ZonalKernel};
pub use needlet::{
    filtered_hyper, DegreePolicy, LocalisedSystem, NeedletCoefficients, NeedletSystem,
};
pub use quadrature::{load_pointset, tensor_rule, verify_exactness, DesignLibrary, QuadratureRule, RuleSource};
pub use sphere::{PointSet, Rotation, UnitVector};
