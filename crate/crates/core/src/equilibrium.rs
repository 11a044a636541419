//! Best responses and contract equilibria.
//!
//! Under the quadratic-deviation contract a sensor's expected utility splits
//! into a term that depends only on its own effort and a term that depends
//! only on the others. Maximizing it is the same as minimizing
//!
//! ```text
//! ξ(a) = α γ ((n−1)/n)² η(a) + f(a),   a ≥ 0,
//! ```
//!
//! so best responses decouple and each one is a dominant strategy. When
//! `ξ′(0) < 0` and `ξ″ > 0`, the minimizer is the unique root of `ξ′`, found
//! here by bracketing and bisection.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{own_weight, EffortProfile, GameSpec, SensorProfile};
use crate::math::{abs, geometric_grid, positive_sum};

/// Default solver tolerance on both the residual `|ξ′(a*)|` and the final
/// bracket width.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest effort the bracket expansion will try.
pub const A_MAX: f64 = 1e6;

/// Sampled convexity check: geometric grid on `[1e-6, 1e4]`, plus `a = 0`.
pub const CONVEXITY_GRID_POINTS: usize = 1024;
pub const CONVEXITY_GRID_LO: f64 = 1e-6;
pub const CONVEXITY_GRID_HI: f64 = 1e4;

const FALLBACK_GRID_POINTS: usize = 100_000;
const MIN_GRID_POINTS: usize = 1000;
const ZOOM_ROUNDS: usize = 3;

/// The per-sensor objective `ξ` whose minimizer is the best response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponseObjective {
    pub sensor: SensorProfile,
    pub gamma: f64,
    pub n: usize,
}

impl BestResponseObjective {
    pub fn new(sensor: SensorProfile, gamma: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSensors(n));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter("gamma must be nonnegative"));
        }
        sensor.validate()?;
        Ok(BestResponseObjective { sensor, gamma, n })
    }

    /// Objective of sensor `i` in `spec`.
    pub fn for_sensor(spec: &GameSpec, i: usize) -> Result<Self> {
        Ok(BestResponseObjective {
            sensor: *spec.sensor(i)?,
            gamma: spec.contract(i)?.gamma,
            n: spec.n(),
        })
    }

    /// `α γ ((n−1)/n)²`, the weight on `η` inside `ξ`.
    pub fn noise_weight(&self) -> f64 {
        self.sensor.alpha * self.gamma * own_weight(self.n)
    }

    pub fn xi_value(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.xi(a))
    }

    pub fn xi_deriv1(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.dxi(a))
    }

    pub fn xi_deriv2(&self, a: f64) -> Result<f64> {
        check_domain(a)?;
        Ok(self.ddxi(a))
    }

    pub(crate) fn xi(&self, a: f64) -> f64 {
        self.noise_weight() * self.sensor.noise.value(a) + self.sensor.cost.value(a)
    }

    pub(crate) fn dxi(&self, a: f64) -> f64 {
        self.noise_weight() * self.sensor.noise.d1(a) + self.sensor.cost.d1(a)
    }

    pub(crate) fn ddxi(&self, a: f64) -> f64 {
        self.noise_weight() * self.sensor.noise.d2(a) + self.sensor.cost.d2(a)
    }

    fn curvature_positive(&self, a: f64) -> bool {
        let w = self.noise_weight();
        let w_sign = if w > 0.0 { 1 } else { 0 };
        positive_sum(&[
            (
                w_sign * self.sensor.noise.d2_sign(a),
                w * self.sensor.noise.d2(a),
            ),
            (self.sensor.cost.d2_sign(a), self.sensor.cost.d2(a)),
        ])
    }
}

fn check_domain(a: f64) -> Result<()> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(a))
    }
}

/// Truth values of the existence, interior and strict-convexity conditions,
/// plus whether the reported best response sits on the boundary `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EquilibriumDiagnostics {
    /// Cost is unbounded above.
    pub existence_ok: bool,
    /// `ξ′(0) < 0`.
    pub interior_ok: bool,
    /// `ξ″ > 0` at every sampled point.
    pub strict_convexity_ok: bool,
    pub boundary_solution: bool,
}

pub fn check_conditions(obj: &BestResponseObjective) -> EquilibriumDiagnostics {
    let strict_convexity_ok = core::iter::once(0.0)
        .chain(geometric_grid(
            CONVEXITY_GRID_LO,
            CONVEXITY_GRID_HI,
            CONVEXITY_GRID_POINTS,
        ))
        .all(|a| obj.curvature_positive(a));
    EquilibriumDiagnostics {
        existence_ok: obj.sensor.cost.unbounded_above(),
        interior_ok: obj.dxi(0.0) < 0.0,
        strict_convexity_ok,
        boundary_solution: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub effort: f64,
    pub diagnostics: EquilibriumDiagnostics,
}

/// Minimizes `ξ` over `a ≥ 0`.
///
/// * `ξ′(0) ≥ 0`: the convex objective is nondecreasing, so `a* = 0` and
///   `boundary_solution` is set.
/// * interior and strictly convex: root of `ξ′` by bracket doubling from
///   `[0, 1]` and bisection until both `|ξ′(a*)|` and the bracket are within
///   `tol`, or the bracket cannot shrink further in `f64`.
/// * convexity not confirmed: brute-force grid minimization; the
///   diagnostics carry `strict_convexity_ok = false`.
pub fn solve_best_response(obj: &BestResponseObjective, tol: f64) -> Result<BestResponse> {
    let mut diagnostics = check_conditions(obj);
    if !diagnostics.existence_ok {
        return Err(Error::ExistenceViolation);
    }
    if !diagnostics.interior_ok {
        diagnostics.boundary_solution = true;
        return Ok(BestResponse {
            effort: 0.0,
            diagnostics,
        });
    }
    let effort = if diagnostics.strict_convexity_ok {
        increasing_root(|a| obj.dxi(a), tol)?
    } else {
        let a_max = coercive_bound(|a| obj.xi(a))?;
        grid_argmin(|a| obj.xi(a), a_max, FALLBACK_GRID_POINTS)
    };
    diagnostics.boundary_solution = effort == 0.0;
    Ok(BestResponse {
        effort,
        diagnostics,
    })
}

/// Root of an increasing `g` with `g(0) < 0`.
pub(crate) fn increasing_root(g: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut g_hi = g(hi);
    while g_hi < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > A_MAX {
            return Err(Error::BracketExceeded(A_MAX));
        }
        g_hi = g(hi);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    let mut g_lo = g(lo);
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid < 0.0 {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
        if hi - lo <= tol && abs(g_lo).min(abs(g_hi)) <= tol {
            break;
        }
    }
    Ok(if abs(g_lo) <= abs(g_hi) { lo } else { hi })
}

/// Smallest doubling `A ≥ 1` with `ξ(A) > ξ(0)`; every minimizer lies below it.
fn coercive_bound(xi: impl Fn(f64) -> f64) -> Result<f64> {
    let at_zero = xi(0.0);
    let mut a = 1.0;
    while xi(a) <= at_zero {
        a *= 2.0;
        if a > A_MAX {
            return Err(Error::BracketExceeded(A_MAX));
        }
    }
    Ok(a)
}

/// Argmin of `xi` on a uniform grid over `[0, a_max]`, then three rounds of
/// 10× zoom around the incumbent. Ties go to the smaller effort.
pub(crate) fn grid_argmin(xi: impl Fn(f64) -> f64, a_max: f64, points: usize) -> f64 {
    let points = points.max(MIN_GRID_POINTS);
    let mut step = a_max / (points - 1) as f64;
    let (mut best, mut best_val) = scan(&xi, 0.0, step, points);
    for _ in 0..ZOOM_ROUNDS {
        let lo = (best - step).max(0.0);
        let hi = (best + step).min(a_max);
        step /= 10.0;
        let count = libm::round((hi - lo) / step) as usize + 1;
        let (cand, cand_val) = scan(&xi, lo, step, count);
        // keep the incumbent on ties unless the candidate is smaller in a
        if cand_val < best_val || (cand_val == best_val && cand < best) {
            best = cand;
            best_val = cand_val;
        }
    }
    best
}

fn scan(xi: &impl Fn(f64) -> f64, lo: f64, step: f64, count: usize) -> (f64, f64) {
    let mut best = lo;
    let mut best_val = xi(lo);
    for k in 1..count {
        let a = lo + step * k as f64;
        let v = xi(a);
        if v < best_val {
            best = a;
            best_val = v;
        }
    }
    (best, best_val)
}

/// Brute-force minimizer of `ξ` on `[0, a_max]`, used to check the
/// root-finding path. `points` below 1000 is raised to 1000.
pub fn grid_oracle(obj: &BestResponseObjective, a_max: f64, points: usize) -> f64 {
    grid_argmin(|a| obj.xi(a), a_max, points)
}

/// An equilibrium effort profile with per-sensor diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub efforts: EffortProfile,
    pub diagnostics: Vec<EquilibriumDiagnostics>,
}

/// Solves every sensor's best response independently. The resulting profile
/// is an equilibrium in dominant strategies.
pub fn solve_equilibrium(spec: &GameSpec, tol: f64) -> Result<Equilibrium> {
    let mut efforts = Vec::with_capacity(spec.n());
    let mut diagnostics = Vec::with_capacity(spec.n());
    for i in 0..spec.n() {
        let br = solve_best_response(&BestResponseObjective::for_sensor(spec, i)?, tol)?;
        efforts.push(br.effort);
        diagnostics.push(br.diagnostics);
    }
    if spec.is_symmetric() {
        if let Some(&a) = efforts.iter().find(|&&a| abs(a - efforts[0]) > tol) {
            return Err(Error::SymmetryBroken(efforts[0], a));
        }
    }
    Ok(Equilibrium {
        efforts: EffortProfile::new(efforts)?,
        diagnostics,
    })
}

/// `da*/dγ = −α((n−1)/n)² η′(a*) / ξ″(a*)`, positive whenever it is defined.
pub fn equilibrium_sensitivity(obj: &BestResponseObjective, a_star: f64) -> Result<f64> {
    check_domain(a_star)?;
    let diag = check_conditions(obj);
    if !diag.strict_convexity_ok {
        return Err(Error::ConvexityViolation(a_star));
    }
    if !diag.interior_ok || a_star == 0.0 {
        return Err(Error::NotInterior);
    }
    let numerator = -obj.sensor.alpha * own_weight(obj.n) * obj.sensor.noise.d1(a_star);
    Ok(numerator / obj.ddxi(a_star))
}
