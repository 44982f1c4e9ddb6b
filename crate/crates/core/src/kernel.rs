//! Filtered zonal kernels `v_{R,f}(t) = Σ_l f(l/R) (2l+1) P_l(t)`.

use crate::error::{Error, Result};
use crate::filter::Filter;
use crate::harmonics::check_unit_interval;

/// Per-degree multipliers `f(l/R)`, `l = 0..=degree`. For `R < 1` the kernel
/// is the constant 1, i.e. the single multiplier `[1]`.
pub fn filter_multipliers(radius: f64, filter: &dyn Filter) -> Vec<f64> {
    if radius < 1.0 {
        return vec![1.0];
    }
    let top = (radius * filter.support_end()).floor() as usize;
    let mut mult: Vec<f64> = (0..=top).map(|l| filter.eval(l as f64 / radius)).collect();
    while mult.len() > 1 && mult.last() == Some(&0.0) {
        mult.pop();
    }
    mult
}

/// A zonal kernel `Σ_l c_l P_l(t)` with precomputed `c_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalKernel {
    coeffs: Vec<f64>,
}

impl ZonalKernel {
    /// The filtered kernel `v_{R,f}`.
    pub fn filtered(radius: f64, filter: &dyn Filter) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::domain(format!("kernel radius {radius} must be nonnegative")));
        }
        let coeffs = filter_multipliers(radius, filter)
            .into_iter()
            .enumerate()
            .map(|(l, m)| m * (2 * l + 1) as f64)
            .collect();
        Ok(ZonalKernel { coeffs })
    }

    pub fn from_legendre_coeffs(coeffs: Vec<f64>) -> Self {
        ZonalKernel { coeffs }
    }

    /// Polynomial degree in `t`.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn legendre_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_unit_interval(t)?;
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        let mut sum = self.coeffs[0];
        if self.coeffs.len() == 1 {
            return sum;
        }
        let (mut p0, mut p1) = (1.0, t);
        sum += self.coeffs[1] * t;
        for (n, c) in self.coeffs.iter().enumerate().skip(2) {
            let k = (n - 1) as f64;
            let p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
            sum += c * p1;
        }
        sum
    }
}

/// `v_{R,f}(t)`.
pub fn filtered_kernel(radius: f64, filter: &dyn Filter, t: f64) -> Result<f64> {
    ZonalKernel::filtered(radius, filter)?.eval(t)
}
