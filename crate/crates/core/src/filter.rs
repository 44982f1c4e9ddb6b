//! Needlet filter `h` and the derived filter `H`.
//!
//! `h` is built from the order-κ smoothstep `ψ` (degree 2κ+1, derivatives
//! 1..=κ vanish at 0 and 1):
//!
//! ```text
//! h(t) = sin(π/2 · ψ(2t − 1))   for 1/2 ≤ t ≤ 1
//! h(t) = cos(π/2 · ψ(t − 1))    for 1 ≤ t ≤ 2
//! h(t) = 0                      otherwise
//! ```
//!
//! so `h(t)² + h(2t)² = 1` on `[1/2, 1]` holds identically and `h ∈ C^κ`.

use crate::error::{Error, Result};

/// Default smoothness of the needlet filter.
pub const DEFAULT_KAPPA: usize = 5;

/// A real window on `[0, ∞)` with bounded support.
pub trait Filter: Sync {
    fn eval(&self, t: f64) -> f64;

    /// Right end of the support: `eval(t) = 0` for `t ≥ support_end()`.
    fn support_end(&self) -> f64;
}

/// Binomial coefficient as `f64`; exact for the small arguments used here.
fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Order-κ smoothstep polynomial on `[0, 1]`, clamped outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothstep {
    kappa: usize,
    coeffs: Vec<f64>,
}

impl Smoothstep {
    pub fn new(kappa: usize) -> Self {
        // ψ(x) = x^{κ+1} Σ_{i=0}^{κ} C(κ+i, i) (1-x)^i
        let coeffs = (0..=kappa).map(|i| binomial(kappa + i, i)).collect();
        Smoothstep { kappa, coeffs }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let y = 1.0 - x;
        let tail = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c);
        x.powi(self.kappa as i32 + 1) * tail
    }
}

/// The needlet filter `h`, supported on `[1/2, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeedletFilter {
    transition: Smoothstep,
}

impl NeedletFilter {
    pub fn new(kappa: usize) -> Result<Self> {
        if kappa < 1 {
            return Err(Error::domain("filter smoothness kappa must be at least 1"));
        }
        Ok(NeedletFilter {
            transition: Smoothstep::new(kappa),
        })
    }

    pub fn kappa(&self) -> usize {
        self.transition.kappa()
    }

    pub fn transition(&self) -> &Smoothstep {
        &self.transition
    }

    pub fn h(&self, t: f64) -> f64 {
        use std::f64::consts::FRAC_PI_2;
        if t <= 0.5 || t >= 2.0 || t.is_nan() {
            0.0
        } else if t <= 1.0 {
            (FRAC_PI_2 * self.transition.eval(2.0 * t - 1.0)).sin()
        } else {
            (FRAC_PI_2 * self.transition.eval(t - 1.0)).cos()
        }
    }

    /// `H` built on this filter.
    pub fn big_h(&self) -> FilterH {
        FilterH { base: self.clone() }
    }

    /// `h²`, the filter of the level-wise kernel sums.
    pub fn squared(&self) -> SquaredFilter {
        SquaredFilter { base: self.clone() }
    }
}

impl Default for NeedletFilter {
    fn default() -> Self {
        NeedletFilter::new(DEFAULT_KAPPA).expect("default kappa is valid")
    }
}

/// Builds `h` with smoothness `kappa`.
pub fn make_needlet_filter(kappa: usize) -> Result<NeedletFilter> {
    NeedletFilter::new(kappa)
}

impl Filter for NeedletFilter {
    fn eval(&self, t: f64) -> f64 {
        self.h(t)
    }

    fn support_end(&self) -> f64 {
        2.0
    }
}

/// `H(t) = 1` on `[0, 1)`, `h(t)²` for `t ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterH {
    base: NeedletFilter,
}

impl FilterH {
    pub fn new(base: NeedletFilter) -> Self {
        FilterH { base }
    }

    pub fn base(&self) -> &NeedletFilter {
        &self.base
    }

    pub fn try_eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("H is defined for t >= 0, got {t}")));
        }
        Ok(self.value(t))
    }

    fn value(&self, t: f64) -> f64 {
        if t < 1.0 {
            1.0
        } else {
            let h = self.base.h(t);
            h * h
        }
    }
}

/// Evaluates `H(t)`; negative `t` is a domain error.
pub fn eval_big_h(filter: &FilterH, t: f64) -> Result<f64> {
    filter.try_eval(t)
}

impl Filter for FilterH {
    fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.value(t)
        }
    }

    fn support_end(&self) -> f64 {
        2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquaredFilter {
    base: NeedletFilter,
}

impl Filter for SquaredFilter {
    fn eval(&self, t: f64) -> f64 {
        let h = self.base.h(t);
        h * h
    }

    fn support_end(&self) -> f64 {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smoothstep_endpoints_and_flatness() {
        for kappa in 1..=6 {
            let psi = Smoothstep::new(kappa);
            assert_eq!(psi.eval(0.0), 0.0);
            assert!((psi.eval(1.0) - 1.0).abs() < 1e-15);
            assert!((psi.eval(0.5) - 0.5).abs() < 1e-14, "symmetry at 1/2");
            // ψ(x) = O(x^{κ+1}) at 0
            // ψ(x) ≈ C(2κ+1, κ) x^{κ+1} at 0
            let x = 1e-3;
            let lead = binomial(2 * kappa + 1, kappa);
            assert!(psi.eval(x) < lead * x.powi(kappa as i32 + 1));
            assert!(1.0 - psi.eval(1.0 - x) < lead * x.powi(kappa as i32 + 1) * (1.0 + 1e-6));
        }
    }

    #[test]
    fn filter_examples() {
        let h = make_needlet_filter(5).unwrap();
        assert_eq!(h.h(0.5), 0.0);
        assert!(h.h(2.0).abs() < 1e-16);
        assert!((h.h(1.0) - 1.0).abs() < 1e-15);
        assert!((h.h(0.75).powi(2) + h.h(1.5).powi(2) - 1.0).abs() < 1e-15);
        assert_eq!(h.h(0.3), 0.0);
        assert_eq!(h.h(2.5), 0.0);
        assert!(make_needlet_filter(0).is_err());
    }

    #[test]
    fn big_h_examples() {
        let big = NeedletFilter::default().big_h();
        assert_eq!(eval_big_h(&big, 0.5).unwrap(), 1.0);
        assert_eq!(eval_big_h(&big, 0.0).unwrap(), 1.0);
        assert!(eval_big_h(&big, 2.0).unwrap().abs() < 1e-30);
        assert_eq!(eval_big_h(&big, 3.0).unwrap(), 0.0);
        let h12 = big.base().h(1.2);
        assert_eq!(eval_big_h(&big, 1.2).unwrap(), h12 * h12);
        assert!(eval_big_h(&big, -0.1).is_err());
    }

    /// Largest |one-sided derivative estimate difference| of order `n`
    /// across `t0` at step `step`.
    fn jump(h: &NeedletFilter, t0: f64, n: usize, step: f64) -> f64 {
        let diff = |sign: f64| -> f64 {
            (0..=n)
                .map(|i| {
                    let c = binomial(n, i) * if (n - i).is_multiple_of(2) { 1.0 } else { -1.0 };
                    c * h.h(t0 + sign * i as f64 * step)
                })
                .sum::<f64>()
                / (sign * step).powi(n as i32)
        };
        (diff(1.0) - diff(-1.0)).abs()
    }

    #[test]
    fn derivatives_match_across_breakpoints() {
        let h = NeedletFilter::new(5).unwrap();
        for &t0 in &[0.5, 1.0, 2.0] {
            for n in 1..=3 {
                let coarse = jump(&h, t0, n, 4e-3);
                let fine = jump(&h, t0, n, 1e-3);
                // a derivative jump would leave a gap that does not shrink;
                // matching derivatives make it shrink at least linearly
                assert!(fine < 1e-4 || 4.0 * fine < coarse, "t0={t0} n={n} coarse={coarse} fine={fine}");
            }
        }
    }

    fn max_fifth_difference(h: &NeedletFilter, step: f64) -> f64 {
        let mut max = 0.0f64;
        let mut t = 0.4;
        while t < 2.1 {
            let d5: f64 = (0..=5)
                .map(|i| binomial(5, i) * if (5 - i) % 2 == 0 { 1.0 } else { -1.0 } * h.h(t + (i as f64 - 2.5) * step))
                .sum::<f64>()
                / step.powi(5);
            max = max.max(d5.abs());
            t += 1e-3;
        }
        max
    }

    #[test]
    fn kappa_order_differences_stay_bounded() {
        // a jump in a derivative of order < 5 would make these grow like 1/step
        let h = NeedletFilter::new(5).unwrap();
        let coarse = max_fifth_difference(&h, 2e-2);
        let fine = max_fifth_difference(&h, 1e-2);
        assert!(fine.is_finite() && fine < 1.2 * coarse, "coarse={coarse} fine={fine}");
    }

    proptest! {
        #[test]
        fn partition_of_unity(t in 0.5f64..=1.0, kappa in 1usize..8) {
            let h = NeedletFilter::new(kappa).unwrap();
            prop_assert!((h.h(t).powi(2) + h.h(2.0 * t).powi(2) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn range_is_unit_interval(t in -1.0f64..4.0) {
            let h = NeedletFilter::default();
            let v = h.h(t);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn telescoping(t in 1.0f64..512.0, levels in 0u32..=8) {
            let h = NeedletFilter::default();
            let big = h.big_h();
            prop_assume!(t <= 2f64.powi(levels as i32 + 1));
            let lhs = big.eval(t / 2f64.powi(levels as i32));
            let rhs: f64 = (0..=levels).map(|j| h.h(t / 2f64.powi(j as i32)).powi(2)).sum();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
