//! Closed-form cost and noise-variance families.
//!
//! Cost families are strictly increasing and unbounded above on `a ≥ 0`;
//! noise families are positive and strictly decreasing. Every family is
//! twice continuously differentiable on `a ≥ 0` and has an analytic inverse.

use crate::error::{Error, Result};
use crate::math::{exp, geometric_grid, ln, powf};

/// Whether a family plays the cost role `f` or the noise-variance role `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyRole {
    Cost,
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionFamily {
    /// `a ↦ scale · exp(rate · a)`
    ExpCost { scale: f64, rate: f64 },
    /// `a ↦ scale · a^exponent + offset`
    PowerCost {
        scale: f64,
        exponent: f64,
        offset: f64,
    },
    /// `a ↦ rho / (rho + a)`
    HyperbolicNoise { rho: f64 },
    /// `a ↦ variance0 · exp(−rate · a)`
    ExpNoise { variance0: f64, rate: f64 },
}

// Sample points for the monotonicity check done at construction.
const MONOTONE_CHECK_POINTS: usize = 64;

impl FunctionFamily {
    pub fn exp_cost(scale: f64, rate: f64) -> Result<Self> {
        FunctionFamily::ExpCost { scale, rate }.validated()
    }

    pub fn power_cost(scale: f64, exponent: f64, offset: f64) -> Result<Self> {
        FunctionFamily::PowerCost {
            scale,
            exponent,
            offset,
        }
        .validated()
    }

    pub fn hyperbolic_noise(rho: f64) -> Result<Self> {
        FunctionFamily::HyperbolicNoise { rho }.validated()
    }

    pub fn exp_noise(variance0: f64, rate: f64) -> Result<Self> {
        FunctionFamily::ExpNoise { variance0, rate }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks parameter ranges, then confirms the sign of the analytic first
    /// derivative on a sample grid.
    pub fn validate(&self) -> Result<()> {
        fn positive(x: f64, what: &'static str) -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(what))
            }
        }
        match *self {
            FunctionFamily::ExpCost { scale, rate } => {
                positive(scale, "exp cost scale must be positive")?;
                positive(rate, "exp cost rate must be positive")?;
            }
            FunctionFamily::PowerCost {
                scale,
                exponent,
                offset,
            } => {
                positive(scale, "power cost scale must be positive")?;
                // a^q with 1 < q < 2 has an unbounded second derivative at 0
                if !(exponent == 1.0 || (exponent.is_finite() && exponent >= 2.0)) {
                    return Err(Error::InvalidParameter(
                        "power cost exponent must be 1 or at least 2",
                    ));
                }
                if !(offset.is_finite() && offset >= 0.0) {
                    return Err(Error::InvalidParameter(
                        "power cost offset must be nonnegative",
                    ));
                }
            }
            FunctionFamily::HyperbolicNoise { rho } => {
                positive(rho, "hyperbolic noise rho must be positive")?;
            }
            FunctionFamily::ExpNoise { variance0, rate } => {
                positive(variance0, "exp noise variance must be positive")?;
                positive(rate, "exp noise rate must be positive")?;
            }
        }
        let expected_sign = match self.role() {
            FamilyRole::Cost => 1.0,
            FamilyRole::Noise => -1.0,
        };
        for a in geometric_grid(1e-6, 1e2, MONOTONE_CHECK_POINTS) {
            let d = self.d1(a);
            if d.is_nan() || d * expected_sign < 0.0 {
                return Err(Error::InvalidParameter(
                    "family is not strictly monotone in its role's direction",
                ));
            }
        }
        Ok(())
    }

    pub fn role(&self) -> FamilyRole {
        match self {
            FunctionFamily::ExpCost { .. } | FunctionFamily::PowerCost { .. } => FamilyRole::Cost,
            FunctionFamily::HyperbolicNoise { .. } | FunctionFamily::ExpNoise { .. } => {
                FamilyRole::Noise
            }
        }
    }

    /// `lim_{a→∞} f(a) = ∞`. True for every cost family here.
    pub fn unbounded_above(&self) -> bool {
        self.role() == FamilyRole::Cost
    }

    pub fn eval(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.value(a))
    }

    pub fn deriv1(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.d1(a))
    }

    pub fn deriv2(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.d2(a))
    }

    pub(crate) fn value(&self, a: f64) -> f64 {
        match *self {
            FunctionFamily::ExpCost { scale, rate } => scale * exp(rate * a),
            FunctionFamily::PowerCost {
                scale,
                exponent,
                offset,
            } => scale * powf(a, exponent) + offset,
            FunctionFamily::HyperbolicNoise { rho } => rho / (rho + a),
            FunctionFamily::ExpNoise { variance0, rate } => variance0 * exp(-rate * a),
        }
    }

    pub(crate) fn d1(&self, a: f64) -> f64 {
        match *self {
            FunctionFamily::ExpCost { scale, rate } => scale * rate * exp(rate * a),
            FunctionFamily::PowerCost {
                scale, exponent, ..
            } => {
                if exponent == 1.0 {
                    scale
                } else {
                    scale * exponent * powf(a, exponent - 1.0)
                }
            }
            FunctionFamily::HyperbolicNoise { rho } => -rho / ((rho + a) * (rho + a)),
            FunctionFamily::ExpNoise { variance0, rate } => -variance0 * rate * exp(-rate * a),
        }
    }

    pub(crate) fn d2(&self, a: f64) -> f64 {
        match *self {
            FunctionFamily::ExpCost { scale, rate } => scale * rate * rate * exp(rate * a),
            FunctionFamily::PowerCost {
                scale, exponent, ..
            } => {
                if exponent == 1.0 {
                    0.0
                } else if exponent == 2.0 {
                    2.0 * scale
                } else {
                    scale * exponent * (exponent - 1.0) * powf(a, exponent - 2.0)
                }
            }
            FunctionFamily::HyperbolicNoise { rho } => {
                let s = rho + a;
                2.0 * rho / (s * s * s)
            }
            FunctionFamily::ExpNoise { variance0, rate } => {
                variance0 * rate * rate * exp(-rate * a)
            }
        }
    }

    /// Exact sign of `d1(a)`, immune to the under- and overflow of the value.
    pub(crate) fn d1_sign(&self, a: f64) -> i8 {
        match *self {
            FunctionFamily::ExpCost { .. } => 1,
            FunctionFamily::PowerCost { exponent, .. } => {
                if exponent == 1.0 || a > 0.0 {
                    1
                } else {
                    0
                }
            }
            FunctionFamily::HyperbolicNoise { .. } | FunctionFamily::ExpNoise { .. } => -1,
        }
    }

    /// Exact sign of `d2(a)`.
    pub(crate) fn d2_sign(&self, a: f64) -> i8 {
        match *self {
            FunctionFamily::PowerCost { exponent, .. } => {
                if exponent == 1.0 {
                    0
                } else if exponent == 2.0 || a > 0.0 {
                    1
                } else {
                    0
                }
            }
            _ => 1,
        }
    }

    /// Attainable values over `a ≥ 0` as `(lo, hi, lo_open)`.
    ///
    /// Cost families cover `[f(0), ∞)`; noise families cover `(0, η(0)]`.
    pub fn range(&self) -> (f64, f64, bool) {
        match self.role() {
            FamilyRole::Cost => (self.value(0.0), f64::INFINITY, false),
            FamilyRole::Noise => (0.0, self.value(0.0), true),
        }
    }

    fn check_range(&self, v: f64) -> Result<()> {
        let (lo, hi, lo_open) = self.range();
        let above_lo = if lo_open { v > lo } else { v >= lo };
        if v.is_finite() && above_lo && v <= hi {
            Ok(())
        } else {
            Err(Error::range(v, lo, hi, lo_open))
        }
    }

    /// Closed-form inverse: the effort `a ≥ 0` with `eval(a) = v`.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        self.check_range(v)?;
        let a = match *self {
            FunctionFamily::ExpCost { scale, rate } => ln(v / scale) / rate,
            FunctionFamily::PowerCost {
                scale,
                exponent,
                offset,
            } => powf((v - offset) / scale, 1.0 / exponent),
            FunctionFamily::HyperbolicNoise { rho } => rho * (1.0 - v) / v,
            FunctionFamily::ExpNoise { variance0, rate } => ln(variance0 / v) / rate,
        };
        Ok(a.max(0.0))
    }

    /// Inverse by bisection, bracket grown geometrically from `[0, 1]`.
    ///
    /// Works for any monotone family; kept alongside the closed forms as an
    /// independent route.
    pub fn inverse_by_bisection(&self, v: f64) -> Result<f64> {
        self.check_range(v)?;
        let sign = match self.role() {
            FamilyRole::Cost => 1.0,
            FamilyRole::Noise => -1.0,
        };
        // g is increasing with a root at the answer
        let g = |a: f64| sign * (self.value(a) - v);
        if g(0.0) >= 0.0 {
            return Ok(0.0);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while g(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::BracketExceeded(lo));
            }
        }
        loop {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi || hi - lo <= INVERSE_TOL {
                break;
            }
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(if crate::math::abs(g(lo)) <= crate::math::abs(g(hi)) {
            lo
        } else {
            hi
        })
    }
}

const INVERSE_TOL: f64 = 1e-14;

fn check_domain(a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(a))
    }
}
